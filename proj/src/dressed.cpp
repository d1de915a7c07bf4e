#include "nspec/dressed.hpp"

#include <algorithm>
#include <cmath>

namespace nspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hamiltonian_norm(const DriveConfig& cfg) {
  return build_hamiltonian(cfg).norm();
}

CubicCoefficients coeffs_unchecked(const DriveConfig& cfg) {
  CubicCoefficients c;
  const double w1sq = cfg.omega1 * cfg.omega1;
  const double w2sq = cfg.omega2 * cfg.omega2;
  c.alpha = -2.0 * cfg.delta1 + cfg.delta2;
  c.beta = cfg.delta1 * (cfg.delta1 - cfg.delta2) - 0.25 * (w1sq + w2sq);
  c.gamma = 0.25 * w1sq * (cfg.delta1 - cfg.delta2);
  c.p = std::sqrt(std::max(c.alpha * c.alpha - 3.0 * c.beta, 0.0));

  const double eps_p = 1e-9 * std::max(1.0, hamiltonian_norm(cfg));
  if (c.p < eps_p) {
    c.degenerate = true;
    c.theta = 0.0;
    return c;
  }

  const double num = 27.0 * c.gamma + 2.0 * c.alpha * c.alpha * c.alpha -
                     9.0 * c.alpha * c.beta;
  double ratio = -num / (2.0 * c.p * c.p * c.p);
  // p^3 in the denominator amplifies rounding; excursions beyond 1e-9 mean
  // the coefficients are inconsistent.
  if (std::abs(ratio) > 1.0 + 1e-9) {
    throw Error("characteristic cubic: cos(theta) ratio out of range: " +
                std::to_string(ratio));
  }
  ratio = std::clamp(ratio, -1.0, 1.0);
  c.theta = std::acos(ratio);
  return c;
}

/// Largest-magnitude component positive; ties resolved toward higher index
/// so the resonance closed forms come out with a positive d component.
void fix_sign(Eigen::Ref<Eigen::Vector3d> v) {
  const double amax = v.cwiseAbs().maxCoeff();
  int pick = 0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) >= amax * (1.0 - 1e-12)) pick = i;
  }
  if (v[pick] < 0.0) v = -v;
}

}  // namespace

void DriveConfig::validate() const {
  if (!std::isfinite(omega1) || !std::isfinite(omega2) ||
      !std::isfinite(delta1) || !std::isfinite(delta2)) {
    throw Error("drive parameters must be finite");
  }
  if (omega1 < 0.0 || omega2 < 0.0) {
    throw Error("Rabi frequencies must be non-negative");
  }
}

Eigen::Matrix3d build_hamiltonian(const DriveConfig& cfg) {
  cfg.validate();
  Eigen::Matrix3d h;
  h << cfg.delta1, cfg.omega2 / 2.0, cfg.omega1 / 2.0,
       cfg.omega2 / 2.0, cfg.delta1 - cfg.delta2, 0.0,
       cfg.omega1 / 2.0, 0.0, 0.0;
  return h;
}

CubicCoefficients characteristic_coeffs(const DriveConfig& cfg) {
  cfg.validate();
  CubicCoefficients c = coeffs_unchecked(cfg);
  if (c.degenerate) {
    throw DegenerateSpectrum("characteristic cubic has a triple root (p = " +
                             std::to_string(c.p) + ")");
  }
  return c;
}

Eigen::Vector3d dressed_energies(const DriveConfig& cfg) {
  cfg.validate();
  const CubicCoefficients c = coeffs_unchecked(cfg);
  if (c.degenerate) {
    return Eigen::Vector3d::Constant(-c.alpha / 3.0);
  }
  const double base = -c.alpha / 3.0;
  const double r = 2.0 * c.p / 3.0;
  const double t = c.theta / 3.0;
  // This parameterization is descending for theta in [0, pi].
  return {base + r * std::cos(t),
          base - r * std::cos(t + kPi / 3.0),
          base - r * std::cos(t - kPi / 3.0)};
}

Eigen::Matrix3d dressed_vectors(const DriveConfig& cfg,
                                const Eigen::Vector3d& energies) {
  cfg.validate();
  const double hnorm = hamiltonian_norm(cfg);
  const double null_threshold = 1e-9 * std::max(1.0, hnorm) * std::max(1.0, hnorm);

  Eigen::Matrix3d vectors;
  bool need_fallback = false;
  for (int nu = 0; nu < 3; ++nu) {
    const double e = energies[nu];
    Eigen::Vector3d v(e * cfg.omega2 / 2.0,
                      e * (e - cfg.delta1) - cfg.omega1 * cfg.omega1 / 4.0,
                      cfg.omega1 * cfg.omega2 / 4.0);
    const double n = v.norm();
    if (n < null_threshold) {
      // The component formula vanishes identically for some parameters
      // (e.g. omega2 = 0); take that eigenvector from the iterative solver.
      need_fallback = true;
      vectors.col(nu).setZero();
      continue;
    }
    v /= n;
    fix_sign(vectors.col(nu) = v);
  }

  if (need_fallback) {
    const EigenDecomposition ed = jacobi_eigen(build_hamiltonian(cfg));
    for (int nu = 0; nu < 3; ++nu) {
      if (vectors.col(nu).norm() > 0.5) continue;
      // Match by energy: ed.values is descending like `energies`.
      vectors.col(nu) = ed.vectors.col(nu);
      fix_sign(vectors.col(nu));
    }
  }
  return vectors;
}

Eigen::Vector3d absorption_weights(const DriveConfig& cfg) {
  const Eigen::Vector3d e = dressed_energies(cfg);
  const Eigen::Matrix3d v = dressed_vectors(cfg, e);
  return v.row(2).cwiseAbs2();
}

DressedSolution solve_dressed(const DriveConfig& cfg) {
  DressedSolution s;
  s.energies = dressed_energies(cfg);
  s.vectors = dressed_vectors(cfg, s.energies);
  s.weights = s.vectors.row(2).cwiseAbs2();
  s.degenerate = coeffs_unchecked(cfg).degenerate;
  return s;
}

DressedSolution resonance_solution(double omega1, double omega2) {
  DriveConfig cfg{omega1, omega2, 0.0, 0.0};
  cfg.validate();
  const double weff = std::hypot(omega1, omega2);
  if (weff <= 0.0) {
    throw DegenerateSpectrum("resonance solution needs a nonzero coupling");
  }
  const double c = omega2 / weff;  // <c| fraction of the outer states
  const double d = omega1 / weff;
  const double s2 = 1.0 / std::sqrt(2.0);

  DressedSolution s;
  s.energies << weff / 2.0, 0.0, -weff / 2.0;
  s.vectors.col(0) << s2, s2 * c, s2 * d;
  s.vectors.col(1) << 0.0, -d, c;
  s.vectors.col(2) << -s2, s2 * c, s2 * d;
  for (int nu = 0; nu < 3; ++nu) fix_sign(s.vectors.col(nu));
  s.weights = s.vectors.row(2).cwiseAbs2();
  return s;
}

EigenDecomposition jacobi_eigen(const Eigen::Matrix3d& h) {
  if ((h - h.transpose()).norm() > 1e-9 * std::max(1.0, h.norm())) {
    throw Error("jacobi_eigen requires a symmetric matrix");
  }
  Eigen::Matrix3d a = (h + h.transpose()) / 2.0;
  Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
  const double tol = 1e-12 * std::max(h.norm(), 1e-300);

  auto off = [](const Eigen::Matrix3d& m) {
    return std::max({std::abs(m(0, 1)), std::abs(m(0, 2)), std::abs(m(1, 2))});
  };

  constexpr int kMaxSweeps = 64;
  int sweep = 0;
  while (off(a) > tol) {
    if (++sweep > kMaxSweeps) {
      throw NoConvergence("jacobi_eigen: sweep cap exceeded");
    }
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a(p, q)) <= tol) continue;
        const double phi = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
        g(p, p) = c;
        g(q, q) = c;
        g(p, q) = s;
        g(q, p) = -s;
        a = g.transpose() * a * g;
        a(p, q) = a(q, p) = 0.0;  // rotation zeroes this pair exactly
        v = v * g;
      }
    }
  }

  // Sort descending, carrying the eigenvectors along.
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(),
            [&](int i, int j) { return a(i, i) > a(j, j); });
  EigenDecomposition ed;
  for (int k = 0; k < 3; ++k) {
    ed.values[k] = a(idx[k], idx[k]);
    ed.vectors.col(k) = v.col(idx[k]);
    fix_sign(ed.vectors.col(k));
  }
  return ed;
}

}  // namespace nspec
