#include "nspec/obe.hpp"

#include <cmath>

#include "nspec/parallel.hpp"

namespace nspec::obe {

namespace {

using Matrix4c = Eigen::Matrix<std::complex<double>, 4, 4>;
using Matrix4d = Eigen::Matrix4d;
constexpr std::complex<double> kI{0.0, 1.0};

/// kron(A, B) for 4x4 blocks.
Liouvillian kron4(const Matrix4c& a, const Matrix4c& b) {
  Liouvillian out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    }
  }
  return out;
}

/// Lindblad dissipator for a single jump operator, vectorized
/// (column-major): rate * (conj(C) kron C - 1/2 (I kron C^H C + (C^H C)^T kron I)).
Liouvillian dissipator(int to, int from, double rate) {
  Matrix4c c = Matrix4c::Zero();
  c(to, from) = 1.0;
  const Matrix4c cdc = c.adjoint() * c;
  const Matrix4c id = Matrix4c::Identity();
  return rate * (kron4(c.conjugate(), c) -
                 0.5 * (kron4(id, cdc) + kron4(cdc.transpose(), id)));
}

}  // namespace

void DecayConfig::validate() const {
  if (gamma_d < 0.0 || gamma_c < 0.0 || repump < 0.0) {
    throw InvalidBranching("decay rates must be non-negative");
  }
  for (double b : {branch_d_to_a, branch_d_to_b, branch_c_to_a, branch_c_to_b}) {
    if (b < 0.0) throw InvalidBranching("branching fractions must be >= 0");
  }
  if (std::abs(branch_d_to_a + branch_d_to_b - 1.0) > 1e-12 ||
      std::abs(branch_c_to_a + branch_c_to_b - 1.0) > 1e-12) {
    throw InvalidBranching("branching rows must sum to 1");
  }
}

Liouvillian build_liouvillian(const DriveConfig& drive,
                              const ProbeConfig& probe,
                              const DecayConfig& decay) {
  drive.validate();
  decay.validate();
  if (!(probe.omega_p > 0.0)) throw Error("probe Rabi frequency must be > 0");

  Matrix4d h = Matrix4d::Zero();
  h(0, 0) = drive.delta1;
  h(1, 1) = probe.delta_p;
  h(2, 2) = drive.delta1 - drive.delta2;
  h(0, 3) = h(3, 0) = drive.omega1 / 2.0;
  h(0, 2) = h(2, 0) = drive.omega2 / 2.0;
  h(1, 3) = h(3, 1) = probe.omega_p / 2.0;

  const Matrix4c hc = h.cast<std::complex<double>>();
  const Matrix4c id = Matrix4c::Identity();
  Liouvillian l = -kI * (kron4(id, hc) - kron4(hc.transpose(), id));

  l += dissipator(0, 3, decay.gamma_d * decay.branch_d_to_a);
  l += dissipator(1, 3, decay.gamma_d * decay.branch_d_to_b);
  l += dissipator(0, 2, decay.gamma_c * decay.branch_c_to_a);
  l += dissipator(1, 2, decay.gamma_c * decay.branch_c_to_b);
  if (decay.repump > 0.0) l += dissipator(1, 0, decay.repump);
  return l;
}

DensityMatrix steady_state(const Liouvillian& liouvillian) {
  {
    Eigen::FullPivLU<Liouvillian> lu(liouvillian);
    lu.setThreshold(1e-9);
    if (lu.rank() < 15) {
      throw DegenerateKernel("Liouvillian kernel is not one-dimensional");
    }
  }

  Liouvillian m = liouvillian;
  Eigen::Vector<std::complex<double>, 16> rhs =
      Eigen::Vector<std::complex<double>, 16>::Zero();
  m.row(0).setZero();
  for (int i = 0; i < 4; ++i) m(0, 5 * i) = 1.0;  // trace functional
  rhs[0] = 1.0;

  const Eigen::Vector<std::complex<double>, 16> v =
      Eigen::PartialPivLU<Liouvillian>(m).solve(rhs);

  DensityMatrix rho;
  for (int col = 0; col < 4; ++col) rho.col(col) = v.segment<4>(4 * col);
  rho = (rho + rho.adjoint().eval()) / 2.0;
  rho /= rho.trace().real();
  return rho;
}

double probe_absorption(const DriveConfig& drive, const ProbeConfig& probe,
                        const DecayConfig& decay) {
  const DensityMatrix rho =
      steady_state(build_liouvillian(drive, probe, decay));
  return -rho(3, 1).imag() * decay.gamma_d / probe.omega_p;
}

std::vector<double> probe_absorption_spectrum(const DriveConfig& drive,
                                              const DecayConfig& decay,
                                              std::span<const double> probe_grid,
                                              double omega_p) {
  if (probe_grid.empty()) throw EmptyGrid("probe grid is empty");
  std::vector<double> out(probe_grid.size());
  parallel_for(probe_grid.size(), [&](size_t i) {
    out[i] = probe_absorption(drive, {omega_p, probe_grid[i]}, decay);
  });
  return out;
}

}  // namespace nspec::obe
