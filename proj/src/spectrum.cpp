#include "nspec/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace nspec {

std::vector<double> synthesize(const SpectrumModel& model,
                               std::span<const double> grid) {
  if (grid.empty()) throw EmptyGrid("synthesize: empty probe grid");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error("synthesize: grid must be strictly increasing");
    }
  }
  if (model.lineshape.fwhm <= 0.0) throw Error("synthesize: fwhm must be > 0");
  if (model.coupled_scale <= 0.0) throw Error("synthesize: coupled_scale must be > 0");
  if (model.uncoupled_height < 0.0) throw Error("synthesize: uncoupled_height must be >= 0");

  const DressedSolution sol = solve_dressed(model.drive);
  const double fwhm = model.lineshape.fwhm * model.lineshape.broadening_factor;

  std::vector<double> out(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i] - model.global_shift;
    double v = 0.0;
    for (int nu = 0; nu < 3; ++nu) {
      v += model.coupled_scale * sol.weights[nu] *
           lorentzian(x - sol.energies[nu], fwhm);
    }
    v += model.uncoupled_height * lorentzian(x - model.uncoupled_center, fwhm);
    out[i] = v;
  }
  return out;
}

std::vector<Peak> find_peaks(std::span<const double> grid,
                             std::span<const double> values,
                             double prominence_frac) {
  if (grid.size() != values.size()) {
    throw Error("find_peaks: grid/value size mismatch");
  }
  std::vector<Peak> peaks;
  if (grid.size() < 3) return peaks;

  const double vmax = *std::max_element(values.begin(), values.end());
  const double threshold = prominence_frac * vmax;

  for (size_t i = 1; i + 1 < values.size(); ++i) {
    const double vm = values[i - 1], v0 = values[i], vp = values[i + 1];
    // Left-strict, right-permissive so a flat-topped maximum (two equal
    // samples straddling the true peak) is reported once, at its first
    // sample; the refinement below then shifts onto the plateau midpoint.
    if (!(v0 > vm && v0 >= vp)) continue;
    if (v0 < threshold) continue;
    // Quadratic interpolation through the three samples around the maximum.
    const double denom = vm - 2.0 * v0 + vp;
    double dx = 0.0;
    if (denom < 0.0) dx = 0.5 * (vm - vp) / denom;
    dx = std::clamp(dx, -0.5, 0.5);
    const double hl = grid[i] - grid[i - 1];
    const double hr = grid[i + 1] - grid[i];
    const double h = dx < 0.0 ? hl : hr;
    peaks.push_back({grid[i] + dx * h, v0 - 0.25 * (vm - vp) * dx});
  }

  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.center > b.center; });
  return peaks;
}

Trajectory trajectory_vs_delta2(double omega1, double omega2, double delta1,
                                std::span<const double> delta2_grid) {
  Trajectory t;
  t.delta2.reserve(delta2_grid.size());
  for (double d2 : delta2_grid) {
    const Eigen::Vector3d e =
        dressed_energies({omega1, omega2, delta1, d2});
    t.delta2.push_back(d2);
    t.e1.push_back(e[0]);
    t.e2.push_back(e[1]);
    t.e3.push_back(e[2]);
  }
  return t;
}

WeightCurves weights_vs_ratio(std::span<const double> ratio_grid) {
  WeightCurves w;
  for (double r : ratio_grid) {
    if (r < 0.0) throw Error("weights_vs_ratio: ratios must be >= 0");
    const double half = 0.5 * std::sqrt(1.0 + r * r);
    const double a2 = r * r / (1.0 + r * r);
    const double outer = 0.5 * (1.0 - a2);
    w.ratio.push_back(r);
    w.e1.push_back(half);
    w.e2.push_back(0.0);
    w.e3.push_back(-half);
    w.a1.push_back(outer);
    w.a2.push_back(a2);
    w.a3.push_back(outer);
  }
  return w;
}

namespace {

double branch_gap(double omega1, double omega2, double delta1, double d2,
                  int upper, int lower) {
  const Eigen::Vector3d e = dressed_energies({omega1, omega2, delta1, d2});
  return e[upper] - e[lower];  // >= 0 in the descending labeling
}

/// Golden-section minimization of a unimodal bracket.
template <typename F>
double golden_min(F f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace

std::vector<Anticrossing> anticrossing_gaps(double omega1, double omega2,
                                            double delta1, double delta2_lo,
                                            double delta2_hi,
                                            int scan_samples) {
  if (scan_samples < 3 || !(delta2_hi > delta2_lo)) {
    throw Error("anticrossing_gaps: bad scan window");
  }
  const double step = (delta2_hi - delta2_lo) / (scan_samples - 1);

  std::vector<Anticrossing> found;
  for (auto [upper, lower] : {std::pair{0, 1}, std::pair{1, 2}}) {
    auto gap = [&](double d2) {
      return branch_gap(omega1, omega2, delta1, d2, upper, lower);
    };
    double prev2 = gap(delta2_lo);
    double prev1 = gap(delta2_lo + step);
    for (int i = 2; i < scan_samples; ++i) {
      const double d2 = delta2_lo + i * step;
      const double g = gap(d2);
      if (prev1 < prev2 && prev1 < g) {
        const double loc = golden_min(gap, d2 - 2.0 * step, d2,
                                      1e-10 * std::max(1.0, std::abs(d2)));
        found.push_back({upper, lower, loc, gap(loc)});
      }
      prev2 = prev1;
      prev1 = g;
    }
  }

  if (found.empty()) {
    throw NoAnticrossing("no interior gap minimum on the scan window");
  }
  std::sort(found.begin(), found.end(),
            [](const Anticrossing& a, const Anticrossing& b) {
              return a.delta2 < b.delta2;
            });
  return found;
}

}  // namespace nspec
