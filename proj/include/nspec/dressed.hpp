#pragma once

#include <Eigen/Dense>

#include "nspec/errors.hpp"

namespace nspec {

/// Driving parameters of the V system. All frequencies in MHz (hbar = 1,
/// energies measured in frequency units).
struct DriveConfig {
  double omega1 = 0.0;  ///< Rabi frequency of C1 (a-d transition), >= 0
  double omega2 = 0.0;  ///< Rabi frequency of C2 (a-c transition), >= 0
  double delta1 = 0.0;  ///< detuning of C1
  double delta2 = 0.0;  ///< detuning of C2

  /// Throws Error if any field is non-finite or a Rabi frequency is negative.
  void validate() const;
};

/// Coefficients of the characteristic cubic E^3 + alpha E^2 + beta E + gamma
/// and the derived trigonometric quantities.
struct CubicCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double p = 0.0;      ///< sqrt(alpha^2 - 3 beta), >= 0
  double theta = 0.0;  ///< in [0, pi]; meaningless when degenerate
  bool degenerate = false;
};

/// Full eigensolution of the driven V system.
struct DressedSolution {
  Eigen::Vector3d energies;  ///< descending: E1 >= E2 >= E3
  Eigen::Matrix3d vectors;   ///< column nu = |D_nu> in the (a, c, d) basis
  Eigen::Vector3d weights;   ///< A_nu = |<d|D_nu>|^2, sums to 1
  bool degenerate = false;
};

/// Hamiltonian of the doubly driven V system in the rotating frame,
/// basis order (a, c, d):
///   [ delta1          omega2/2  omega1/2 ]
///   [ omega2/2  delta1-delta2          0 ]
///   [ omega1/2               0          0 ]
Eigen::Matrix3d build_hamiltonian(const DriveConfig& cfg);

/// Coefficients of the characteristic cubic. Throws DegenerateSpectrum when
/// p falls below 1e-9 * max(1, |H|) (triple-root case).
CubicCoefficients characteristic_coeffs(const DriveConfig& cfg);

/// Exact dressed energies by the trigonometric cubic solution, descending.
/// Returns the triple root (-alpha/3, ...) in the degenerate case.
Eigen::Vector3d dressed_energies(const DriveConfig& cfg);

/// Dressed eigenvectors as columns, matching the given energies. Each column
/// is built from the closed-form component triple
///   ( E omega2/2,  E(E - delta1) - omega1^2/4,  omega1 omega2/4 )
/// and falls back to the iterative eigensolver when that triple is
/// numerically null. Sign fixed so the largest-magnitude component is
/// positive (ties resolved toward the d component).
Eigen::Matrix3d dressed_vectors(const DriveConfig& cfg,
                                const Eigen::Vector3d& energies);

/// Probe-absorption weights A_nu = |<d|D_nu>|^2.
Eigen::Vector3d absorption_weights(const DriveConfig& cfg);

/// Energies, vectors and weights in one call.
DressedSolution solve_dressed(const DriveConfig& cfg);

/// Closed forms for mutual resonance (delta1 = delta2 = 0). Throws
/// DegenerateSpectrum when both Rabi frequencies vanish.
DressedSolution resonance_solution(double omega1, double omega2);

struct EigenDecomposition {
  Eigen::Vector3d values;   ///< descending
  Eigen::Matrix3d vectors;  ///< columns, same sign convention as above
};

/// Cyclic Jacobi eigendecomposition of a symmetric 3x3 matrix. Independent
/// of the closed-form path; converges when every off-diagonal is below
/// 1e-12 * |H|. Throws NoConvergence after a fixed sweep cap.
EigenDecomposition jacobi_eigen(const Eigen::Matrix3d& h);

}  // namespace nspec
