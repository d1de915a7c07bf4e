#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "nspec/obe.hpp"
#include "nspec/spectrum.hpp"

using namespace nspec;
using namespace nspec::obe;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

DensityMatrix unvec(const Eigen::Matrix<std::complex<double>, 16, 1>& v) {
  DensityMatrix rho;
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 4; ++r) rho(r, c) = v[4 * c + r];
  }
  return rho;
}

Eigen::Matrix<std::complex<double>, 16, 1> vec(const DensityMatrix& rho) {
  Eigen::Matrix<std::complex<double>, 16, 1> v;
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 4; ++r) v[4 * c + r] = rho(r, c);
  }
  return v;
}

}  // namespace

TEST_CASE("liouvillian preserves the trace") {
  // d(tr rho)/dt = 0 for every rho: the trace functional annihilates L,
  // i.e. rows 0, 5, 10, 15 of L sum to zero column by column.
  const Liouvillian l = build_liouvillian({62, 44, 7, 3}, {0.3, 11.0},
                                          DecayConfig{});
  for (int col = 0; col < 16; ++col) {
    const std::complex<double> s =
        l(0, col) + l(5, col) + l(10, col) + l(15, col);
    CHECK(std::abs(s) < 1e-12);
  }
}

TEST_CASE("liouvillian preserves hermiticity") {
  const Liouvillian l = build_liouvillian({40, 25, 2, -5}, {0.4, 8.0},
                                          DecayConfig{});
  std::mt19937 rng(5);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    DensityMatrix m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        m(r, c) = {gauss(rng), gauss(rng)};
      }
    }
    const DensityMatrix h = m + m.adjoint().eval();
    const DensityMatrix dh = unvec(l * vec(h));
    CHECK((dh - dh.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("steady state: residual and physicality") {
  const Liouvillian l = build_liouvillian({62, 44, 0, 0}, {0.3, 15.0},
                                          DecayConfig{});
  const DensityMatrix rho = steady_state(l);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
  CHECK((rho - rho.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 4; ++i) CHECK(rho(i, i).real() > -1e-12);
  CHECK((l * vec(rho)).norm() <= 1e-10 * l.norm());
}

TEST_CASE("optical pumping collects the population in |b>") {
  const Liouvillian l = build_liouvillian({62, 44, 0, 0}, {0.3, 15.0},
                                          DecayConfig{});
  const DensityMatrix rho = steady_state(l);
  CHECK(rho(1, 1).real() > 0.9);

  // Fields off entirely (with d -> b branching only) leaves b fully
  // populated once a repump empties a.
  DecayConfig d;
  d.branch_d_to_a = 0;
  d.branch_d_to_b = 1;
  d.repump = 0.1;
  const DensityMatrix idle =
      steady_state(build_liouvillian({0, 0, 0, 0}, {1e-3, 1e4}, d));
  CHECK(idle(1, 1).real() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bare case without repump has a degenerate kernel") {
  // With both drives off and no route out of |a>, the decoupled |a> and
  // the driven {b, d} pair are separately stationary.
  DecayConfig iso;
  iso.branch_d_to_a = 0;
  iso.branch_d_to_b = 1;
  CHECK_THROWS_AS(
      steady_state(build_liouvillian({0, 0, 0, 0}, {0.3, 0.0}, iso)),
      DegenerateKernel);
}

TEST_CASE("bare two-level probe line: unit peak and width gamma_d") {
  DecayConfig d;
  d.branch_d_to_a = 0;
  d.branch_d_to_b = 1;
  d.repump = 0.05;
  const double peak = probe_absorption({0, 0, 0, 0}, {0.1, 0.0}, d);
  CHECK(peak == doctest::Approx(1.0).epsilon(0.01));
  // Half maximum at delta_p = gamma_d / 2.
  const double half = probe_absorption({0, 0, 0, 0}, {0.1, d.gamma_d / 2.0}, d);
  CHECK(half == doctest::Approx(peak / 2.0).epsilon(0.02));
}

TEST_CASE("weak probe responds linearly") {
  const double a1 = probe_absorption({62, 44, 0, 0}, {0.05, 38.0}, DecayConfig{});
  const double a2 = probe_absorption({62, 44, 0, 0}, {0.2, 38.0}, DecayConfig{});
  CHECK(a2 == doctest::Approx(a1).epsilon(0.01));  // normalized by omega_p
}

TEST_CASE("Autler-Townes doublet at +-omega1/2") {
  DecayConfig d;
  d.gamma_c = 0.5;
  const auto g = grid(-90, 90, 601);
  const auto spec = probe_absorption_spectrum({120, 0, 0, 0}, d, g);
  const auto peaks = find_peaks(g, spec);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].center == doctest::Approx(60.0).epsilon(0.01));
  CHECK(peaks[1].center == doctest::Approx(-60.0).epsilon(0.01));
}

TEST_CASE("peak positions converge to the dressed energies") {
  // Shrinking the linewidths moves the three peaks onto the eigenvalues.
  const DriveConfig drive{62, 44, 0, 0};
  const DressedSolution sol = solve_dressed(drive);
  DecayConfig d;
  d.gamma_d = 1.0;
  d.gamma_c = 0.2;
  const auto g = grid(-60, 60, 2401);
  const auto spec = probe_absorption_spectrum(drive, d, g, 0.05);
  const auto peaks = find_peaks(g, spec);
  REQUIRE(peaks.size() == 3);
  for (int nu = 0; nu < 3; ++nu) {
    CHECK(peaks[nu].center ==
          doctest::Approx(sol.energies[nu]).epsilon(0.0).scale(1.0).epsilon(1e-2));
  }
}

TEST_CASE("peak heights follow the weights when gamma_c is small") {
  const DriveConfig drive{62, 44, 0, 0};
  const DressedSolution sol = solve_dressed(drive);
  DecayConfig d;
  d.gamma_c = 0.1;
  const auto g = grid(-60, 60, 1201);
  const auto spec = probe_absorption_spectrum(drive, d, g);
  const auto peaks = find_peaks(g, spec);
  REQUIRE(peaks.size() == 3);
  double hsum = 0.0;
  for (const auto& p : peaks) hsum += p.height;
  for (int nu = 0; nu < 3; ++nu) {
    CHECK(peaks[nu].height / hsum ==
          doctest::Approx(sol.weights[nu]).epsilon(0.02));
  }
}

TEST_CASE("peak areas follow the weights at the nominal linewidths") {
  // At gamma_c comparable to gamma_d the central line doubles in width, so
  // heights deviate from the weights but integrated areas still track them.
  const DriveConfig drive{62, 44, 0, 0};
  const DressedSolution sol = solve_dressed(drive);
  const auto g = grid(-120, 120, 1601);
  const auto spec = probe_absorption_spectrum(drive, DecayConfig{}, g);
  // Split the grid at the midpoints between dressed energies and integrate.
  const double cut1 = 0.5 * (sol.energies[0] + sol.energies[1]);
  const double cut2 = 0.5 * (sol.energies[1] + sol.energies[2]);
  double area[3] = {0, 0, 0}, total = 0.0;
  for (size_t i = 1; i < g.size(); ++i) {
    const double x = 0.5 * (g[i] + g[i - 1]);
    const double da = 0.5 * (spec[i] + spec[i - 1]) * (g[i] - g[i - 1]);
    area[x > cut1 ? 0 : (x > cut2 ? 1 : 2)] += da;
    total += da;
  }
  for (int nu = 0; nu < 3; ++nu) {
    CHECK(area[nu] / total == doctest::Approx(sol.weights[nu]).epsilon(0.10));
  }
}

TEST_CASE("EIT suppression with the second drive off") {
  // Lambda EIT: on two-photon resonance the probe absorption collapses.
  const double on_res = probe_absorption({60, 0, 0, 0}, {0.3, 0.0}, DecayConfig{});
  DecayConfig d;
  d.branch_d_to_a = 0;
  d.branch_d_to_b = 1;
  d.repump = 0.05;
  const double bare = probe_absorption({0, 0, 0, 0}, {0.3, 0.0}, d);
  CHECK(on_res < 0.1 * bare);
}

TEST_CASE("decay config validation") {
  DecayConfig d;
  d.branch_d_to_a = 0.7;  // row no longer sums to 1
  CHECK_THROWS_AS(d.validate(), InvalidBranching);
  d = DecayConfig{};
  d.gamma_d = -1.0;
  CHECK_THROWS_AS(d.validate(), InvalidBranching);
  d = DecayConfig{};
  d.branch_c_to_a = 1.5;
  d.branch_c_to_b = -0.5;
  CHECK_THROWS_AS(d.validate(), InvalidBranching);
  CHECK_NOTHROW(DecayConfig{}.validate());
}
