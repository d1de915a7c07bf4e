#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "nspec/dressed.hpp"

namespace nspec::obe {

/// Spontaneous decay model of the four-state N configuration.
/// Basis order is (a, b, c, d) throughout; a and b are stable ground
/// states, d decays into {a, b} and c into {a, b}.
struct DecayConfig {
  double gamma_d = 6.0;  ///< total decay rate of |d>, MHz
  double gamma_c = 5.7;  ///< total decay rate of |c>, MHz
  double branch_d_to_a = 0.5;  ///< branch_d_to_b = 1 - branch_d_to_a
  double branch_d_to_b = 0.5;
  double branch_c_to_a = 1.0;
  double branch_c_to_b = 0.0;
  /// Incoherent a -> b transfer rate (MHz), modeling repumping out of the
  /// lower ground manifold. Default off; useful to lift steady-state
  /// degeneracies when some states decouple entirely.
  double repump = 0.0;

  void validate() const;  ///< throws InvalidBranching
};

struct ProbeConfig {
  double omega_p = 0.3;  ///< weak probe Rabi frequency, MHz
  double delta_p = 0.0;  ///< probe detuning, MHz
};

using Liouvillian = Eigen::Matrix<std::complex<double>, 16, 16>;
using DensityMatrix = Eigen::Matrix<std::complex<double>, 4, 4>;

/// Lindblad generator L with d rho/dt = L vec(rho) (column-major
/// vectorization). Rotating-frame diagonal is (delta1, delta_p,
/// delta1 - delta2, 0) for (a, b, c, d): the frame of the V-system
/// Hamiltonian extended so the b level sits at the probe detuning, which
/// puts weak-probe resonances exactly at the dressed energies.
Liouvillian build_liouvillian(const DriveConfig& drive,
                              const ProbeConfig& probe,
                              const DecayConfig& decay);

/// Unit-trace kernel vector of L, found by replacing one row with the
/// trace constraint and solving with pivoting. Throws DegenerateKernel
/// when the kernel is not one-dimensional.
DensityMatrix steady_state(const Liouvillian& liouvillian);

/// -Im(rho_db) * gamma_d / omega_p: normalized so a bare two-level
/// resonance peaks at 1.
double probe_absorption(const DriveConfig& drive, const ProbeConfig& probe,
                        const DecayConfig& decay);

/// Weak-probe absorption over a detuning grid. Points are independent
/// linear solves and are computed in parallel (capped by NSPEC_THREADS).
std::vector<double> probe_absorption_spectrum(const DriveConfig& drive,
                                              const DecayConfig& decay,
                                              std::span<const double> probe_grid,
                                              double omega_p = 0.3);

}  // namespace nspec::obe
