#pragma once

#include <span>
#include <vector>

#include "nspec/dressed.hpp"

namespace nspec {

struct LineshapeConfig {
  double fwhm = 6.0;              ///< Lorentzian FWHM, MHz
  double broadening_factor = 1.0; ///< multiplies fwhm, >= 1
};

/// Weak-probe absorption model: three dressed lines plus a stationary
/// uncoupled peak, all optionally displaced by a constant global shift.
struct SpectrumModel {
  DriveConfig drive;
  LineshapeConfig lineshape;
  double uncoupled_height = 0.0;  ///< h_uc, absorption units
  double uncoupled_center = 0.0;  ///< MHz, fixed, independent of the drive
  double global_shift = 0.0;      ///< MHz (e.g. ~9 for trap-induced displacement)
  double coupled_scale = 1.0;     ///< overall scale of the dressed lines
};

struct Peak {
  double center = 0.0;  ///< MHz
  double height = 0.0;  ///< absorption units
};

/// Unit-peak Lorentzian of the given FWHM.
inline double lorentzian(double x, double fwhm) {
  const double h = fwhm / 2.0;
  return h * h / (x * x + h * h);
}

/// Absorption on a strictly increasing probe-detuning grid:
///   scale * sum_nu A_nu L(dp - shift - E_nu) + h_uc L(dp - shift - center)
std::vector<double> synthesize(const SpectrumModel& model,
                               std::span<const double> grid);

/// Local maxima above `prominence_frac` of the spectrum maximum, centers
/// refined by 3-point quadratic interpolation. Sorted descending by center.
std::vector<Peak> find_peaks(std::span<const double> grid,
                             std::span<const double> values,
                             double prominence_frac = 0.05);

struct Trajectory {
  std::vector<double> delta2;
  std::vector<double> e1, e2, e3;  ///< descending branches, MHz
};

/// Dressed energies swept over delta2 (descending-order labeling).
Trajectory trajectory_vs_delta2(double omega1, double omega2, double delta1,
                                std::span<const double> delta2_grid);

struct WeightCurves {
  std::vector<double> ratio;           ///< omega2 / omega1
  std::vector<double> e1, e2, e3;      ///< energies normalized by omega1
  std::vector<double> a1, a2, a3;      ///< absorption weights
};

/// Resonance closed forms on a grid of omega2/omega1 ratios.
WeightCurves weights_vs_ratio(std::span<const double> ratio_grid);

struct Anticrossing {
  int upper = 0;      ///< branch index of the upper member (0-based)
  int lower = 0;
  double delta2 = 0;  ///< location of the minimum gap, MHz
  double gap = 0;     ///< minimum |E_upper - E_lower|, MHz
};

/// Minimum-gap locations between adjacent dressed branches over a delta2
/// window, found by a coarse scan refined with golden-section search.
/// Throws NoAnticrossing if no interior gap minimum exists on the window.
std::vector<Anticrossing> anticrossing_gaps(double omega1, double omega2,
                                            double delta1, double delta2_lo,
                                            double delta2_hi,
                                            int scan_samples = 801);

}  // namespace nspec
