#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "nspec/zeeman.hpp"

using namespace nspec;
using namespace nspec::zeeman;

namespace {

/// Independent CG oracle: diagonalize the total angular momentum built from
/// ladder operators on the product space (j1) x (j2), then project.
/// Returns <j1 m1; j2 m2 | J M> up to the overall Condon-Shortley sign,
/// which is fixed by requiring <j1 j1; j2 (M-j1) | J M> > 0.
double cg_oracle(int j1, int m1, int j2, int m2, int j, int m) {
  if (m1 + m2 != m) return 0.0;
  const int d1 = 2 * j1 + 1, d2 = 2 * j2 + 1;
  auto jz = [](int jj) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2 * jj + 1, 2 * jj + 1);
    for (int mm = -jj; mm <= jj; ++mm) z(mm + jj, mm + jj) = mm;
    return z;
  };
  auto jplus = [](int jj) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * jj + 1, 2 * jj + 1);
    for (int mm = -jj; mm < jj; ++mm) {
      p(mm + 1 + jj, mm + jj) = std::sqrt(jj * (jj + 1.0) - mm * (mm + 1.0));
    }
    return p;
  };
  const Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(d1, d1);
  const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(d2, d2);
  auto kron = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
      for (int jc = 0; jc < a.cols(); ++jc) {
        out.block(i * b.rows(), jc * b.cols(), b.rows(), b.cols()) =
            a(i, jc) * b;
      }
    }
    return out;
  };
  const Eigen::MatrixXd z = kron(jz(j1), i2) + kron(i1, jz(j2));
  const Eigen::MatrixXd plus = kron(jplus(j1), i2) + kron(i1, jplus(j2));
  const Eigen::MatrixXd minus = plus.transpose();
  const Eigen::MatrixXd j2op = 0.5 * (plus * minus + minus * plus) + z * z;

  // Simultaneous eigenbasis of (J^2, Jz); J^2 eigenvalue J(J+1).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j2op + 1e3 * z);
  for (int col = 0; col < es.eigenvectors().cols(); ++col) {
    const Eigen::VectorXd v = es.eigenvectors().col(col);
    const double jj = v.dot(j2op * v);
    const double mm = v.dot(z * v);
    if (std::abs(jj - j * (j + 1.0)) > 1e-6 || std::abs(mm - m) > 1e-6) {
      continue;
    }
    // Condon-Shortley: component with maximal m1 is positive.
    Eigen::VectorXd w = v;
    const int top1 = j1, top2 = m - top1;
    if (std::abs(top2) <= j2) {
      const double ref = w[(top1 + j1) * (2 * j2 + 1) + (top2 + j2)];
      if (ref < 0) w = -w;
    } else {
      // Fall back: highest populated m1 component positive.
      for (int mm1 = j1; mm1 >= -j1; --mm1) {
        const int mm2 = m - mm1;
        if (std::abs(mm2) > j2) continue;
        const double ref = w[(mm1 + j1) * (2 * j2 + 1) + (mm2 + j2)];
        if (std::abs(ref) > 1e-9) {
          if (ref < 0) w = -w;
          break;
        }
      }
    }
    return w[(m1 + j1) * (2 * j2 + 1) + (m2 + j2)];
  }
  return 0.0;
}

const Component* find_component(const Decomposition& d, ComponentKind kind,
                                size_t skip = 0) {
  for (const Component& c : d.components) {
    if (c.kind == kind) {
      if (skip == 0) return &c;
      --skip;
    }
  }
  return nullptr;
}

int count_kind(const Decomposition& d, ComponentKind kind) {
  int n = 0;
  for (const Component& c : d.components) n += (c.kind == kind);
  return n;
}

}  // namespace

TEST_CASE("clebsch-gordan: selection rules and table values") {
  CHECK(clebsch_gordan(2, 0, 0, 2, 0) == doctest::Approx(0.0));  // dark origin
  CHECK(clebsch_gordan(1, 1, -1, 2, 0) ==
        doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(clebsch_gordan(2, 1, 0, 2, 1) ==
        doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(clebsch_gordan(1, 1, 1, 2, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(clebsch_gordan(1, 0, 1, 2, 2) == doctest::Approx(0.0));  // m' != m+q

  CHECK_THROWS_AS(clebsch_gordan(1, 2, 0, 2, 2), InvalidQuantumNumbers);
  CHECK_THROWS_AS(clebsch_gordan(1, 0, 2, 2, 2), InvalidQuantumNumbers);
}

TEST_CASE("clebsch-gordan agrees with the ladder-operator oracle") {
  for (int j1 = 0; j1 <= 3; ++j1) {
    for (int j2 = 0; j2 <= 2; ++j2) {
      for (int j = std::abs(j1 - j2); j <= j1 + j2; ++j) {
        for (int m1 = -j1; m1 <= j1; ++m1) {
          for (int m2 = -j2; m2 <= j2; ++m2) {
            const int m = m1 + m2;
            if (std::abs(m) > j) continue;
            CHECK(clebsch_gordan_general(j1, m1, j2, m2, j, m) ==
                  doctest::Approx(cg_oracle(j1, m1, j2, m2, j, m))
                      .epsilon(1e-9).scale(1.0));
          }
        }
      }
    }
  }
}

TEST_CASE("clebsch-gordan: orthogonality and sum rules") {
  for (int f : {1, 2}) {
    for (int m = -f; m <= f; ++m) {
      for (int q = -1; q <= 1; ++q) {
        double total = 0.0;
        for (int fp = std::abs(f - 1); fp <= f + 1; ++fp) {
          if (std::abs(m + q) > fp) continue;
          const double c = clebsch_gordan(f, m, q, fp, m + q);
          total += c * c;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  // Unit norm of each coupled state: sum over (m, q) of CG^2 = 1.
  for (int f : {1, 2}) {
    for (int fp = std::abs(f - 1); fp <= f + 1; ++fp) {
      for (int mp = -fp; mp <= fp; ++mp) {
        double total = 0.0;
        for (int m = -f; m <= f; ++m) {
          for (int q = -1; q <= 1; ++q) {
            if (m + q != mp) continue;
            const double c = clebsch_gordan(f, m, q, fp, mp);
            total += c * c;
          }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  // Sign symmetry under m -> -m.
  for (int f : {1, 2}) {
    for (int fp = std::abs(f - 1); fp <= f + 1; ++fp) {
      const double phase = ((f + 1 - fp) % 2 == 0) ? 1.0 : -1.0;
      for (int m = -f; m <= f; ++m) {
        for (int q = -1; q <= 1; ++q) {
          if (std::abs(m + q) > fp) continue;
          CHECK(clebsch_gordan(f, m, q, fp, m + q) ==
                doctest::Approx(phase * clebsch_gordan(f, -m, -q, fp, -m - q))
                    .epsilon(1e-10).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("coupling graph of the orthogonal scheme") {
  const CouplingGraph g = build_coupling_graph(orthogonal_scheme());
  CHECK(g.states.size() == 18);

  auto degree = [&](Manifold man, const std::string& name) {
    int idx = -1;
    for (size_t i = 0; i < g.states.size(); ++i) {
      if (g.states[i].manifold == man && g.states[i].name == name) {
        idx = static_cast<int>(i);
      }
    }
    REQUIRE(idx >= 0);
    int deg = 0;
    for (const ZEdge& e : g.edges) deg += (e.lower == idx || e.upper == idx);
    return deg;
  };

  CHECK(degree(Manifold::b, "0") == 0);
  CHECK(degree(Manifold::c, "-2") == 0);
  CHECK(degree(Manifold::c, "+2") == 0);

  // C1 alone: a V from |0>_a (2 edges) and a W from |+-1>_a (4 edges).
  int from_zero = 0, from_pm1 = 0;
  for (const ZEdge& e : g.edges) {
    if (e.field != Field::C1) continue;
    if (g.states[e.lower].name == "0") ++from_zero;
    else ++from_pm1;
  }
  CHECK(from_zero == 2);
  CHECK(from_pm1 == 4);
}

TEST_CASE("coupling graph of the parallel scheme") {
  const CouplingGraph g = build_coupling_graph(parallel_scheme());
  int found = 0;
  for (const ZEdge& e : g.edges) {
    if (e.field != Field::P) continue;
    const auto& lo = g.states[e.lower];
    const auto& up = g.states[e.upper];
    if ((lo.name == "+2" && up.name == "+2") ||
        (lo.name == "-2" && up.name == "-2")) {
      CHECK(e.amplitude * e.amplitude == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
      ++found;
    }
  }
  CHECK(found == 2);
}

TEST_CASE("basis transformation preserves per-field strength") {
  for (const auto& scheme : {orthogonal_scheme(), parallel_scheme()}) {
    const CouplingGraph g = build_coupling_graph(scheme);
    const CouplingGraph t = transform_basis(g);
    std::map<Field, double> before, after;
    for (const ZEdge& e : g.edges) before[e.field] += e.amplitude * e.amplitude;
    for (const ZEdge& e : t.edges) after[e.field] += e.amplitude * e.amplitude;
    for (Field f : {Field::C1, Field::C2, Field::P}) {
      CHECK(after[f] == doctest::Approx(before[f]).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(
      transform_basis(transform_basis(build_coupling_graph(orthogonal_scheme()))),
      Error);
}

TEST_CASE("orthogonal scheme decomposes into three N configurations") {
  const Decomposition d =
      decompose(transform_basis(build_coupling_graph(orthogonal_scheme())));

  const int n_plain = count_kind(d, ComponentKind::NConfiguration);
  const int n_extra = count_kind(d, ComponentKind::NPlusExtraEdge);
  CHECK(n_plain + n_extra == 3);
  CHECK(n_extra == 1);
  CHECK(count_kind(d, ComponentKind::Other) == 0);

  // Two uncoupled absorptions, each with squared amplitude exactly 1/6.
  REQUIRE(d.uncoupled_edges.size() == 2);
  for (int ei : d.uncoupled_edges) {
    const double a2 = d.graph.edges[ei].amplitude * d.graph.edges[ei].amplitude;
    const auto r = as_rational(a2);
    REQUIRE(r.has_value());
    CHECK(r->num == 1);
    CHECK(r->den == 6);
  }

  // The five-state group: N plus the |2,->_b to |beta>_d transition.
  const Component* extra = find_component(d, ComponentKind::NPlusExtraEdge);
  REQUIRE(extra != nullptr);
  CHECK(extra->states.size() == 5);
  const ZEdge& xe = d.graph.edges[extra->extra_probe_edge];
  CHECK(d.graph.states[xe.lower].manifold == Manifold::b);
  CHECK(d.graph.states[xe.lower].name == "2-");
  CHECK(d.graph.states[xe.upper].manifold == Manifold::d);
  CHECK(d.graph.states[xe.upper].name == "beta");

  // |0>_b keeps degree zero: the dark state.
  bool dark_b0 = false;
  for (int si : d.dark_states) {
    if (d.graph.states[si].manifold == Manifold::b &&
        d.graph.states[si].name == "0") {
      dark_b0 = true;
    }
  }
  CHECK(dark_b0);
}

TEST_CASE("parallel scheme: uncoupled absorption four times stronger") {
  const Decomposition d = decompose(build_coupling_graph(parallel_scheme()));

  REQUIRE(d.uncoupled_edges.size() == 2);
  for (int ei : d.uncoupled_edges) {
    const double a2 = d.graph.edges[ei].amplitude * d.graph.edges[ei].amplitude;
    const auto r = as_rational(a2);
    REQUIRE(r.has_value());
    CHECK(r->num == 2);
    CHECK(r->den == 3);
  }
  // Exactly 4x the orthogonal scheme's per-transition 1/6 (as rationals:
  // (2/3) / (1/6) = 4).
  CHECK(2 * 6 == 4 * 3 * 1);

  CHECK(count_kind(d, ComponentKind::NConfiguration) == 2);
  CHECK(count_kind(d, ComponentKind::VOnly) == 1);
}

TEST_CASE("effective N parameters and splitting spread") {
  const Decomposition d =
      decompose(transform_basis(build_coupling_graph(orthogonal_scheme())));
  const EffectiveParams eff = effective_n_parameters(d, 62.0, 44.0);
  REQUIRE(eff.subsystems.size() == 3);
  // About a 10% spread in the Autler-Townes separation across subsystems.
  CHECK(eff.delta13_spread == doctest::Approx(0.10).epsilon(0.5));
  CHECK(eff.delta13_spread > 0.05);
  CHECK(eff.delta13_spread < 0.15);

  // Homogeneity: everything scales linearly in the base Rabi frequencies.
  const EffectiveParams eff2 = effective_n_parameters(d, 124.0, 88.0);
  CHECK(eff2.delta13_mean == doctest::Approx(2.0 * eff.delta13_mean).epsilon(1e-12));
  CHECK(eff2.delta13_spread == doctest::Approx(eff.delta13_spread).epsilon(1e-12));

  // Uniform couplings give zero spread.
  CouplingGraph fake;
  for (int i = 0; i < 8; ++i) {
    fake.states.push_back({i < 4 ? Manifold::a : Manifold::b, "s"});
  }
  // Two N configurations with equal amplitudes.
  fake.states[1].manifold = Manifold::c;
  fake.states[2].manifold = Manifold::d;
  fake.states[3].manifold = Manifold::b;
  fake.states[5].manifold = Manifold::c;
  fake.states[6].manifold = Manifold::d;
  fake.states[7].manifold = Manifold::b;
  fake.edges.push_back({0, 2, Field::C1, 0.5});
  fake.edges.push_back({0, 1, Field::C2, 0.5});
  fake.edges.push_back({3, 2, Field::P, 0.5});
  fake.edges.push_back({4, 6, Field::C1, 0.5});
  fake.edges.push_back({4, 5, Field::C2, 0.5});
  fake.edges.push_back({7, 6, Field::P, 0.5});
  const EffectiveParams uniform = effective_n_parameters(decompose(fake), 62, 44);
  CHECK(uniform.delta13_spread == doctest::Approx(0.0));

  // No N component at all.
  CouplingGraph empty;
  empty.states.push_back({Manifold::b, "0"});
  CHECK_THROWS_AS(effective_n_parameters(decompose(empty), 62, 44),
                  NotAnNConfiguration);
}

TEST_CASE("rational reconstruction") {
  CHECK(as_rational(1.0 / 6.0)->den == 6);
  CHECK(as_rational(2.0 / 3.0)->num == 2);
  CHECK(as_rational(0.0)->num == 0);
  CHECK(!as_rational(1.0 / std::sqrt(2.0), 100).has_value());
}
