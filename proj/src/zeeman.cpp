#include "nspec/zeeman.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace nspec::zeeman {

namespace {

double factorial(int n) {
  static const std::array<double, 21> table = [] {
    std::array<double, 21> t{};
    t[0] = 1.0;
    for (int i = 1; i <= 20; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table.at(static_cast<size_t>(n));
}

struct FieldSpec {
  Field field;
  Manifold lower;
  Manifold upper;
};

constexpr std::array<FieldSpec, 3> kFieldSpecs{{
    {Field::C1, Manifold::a, Manifold::d},
    {Field::C2, Manifold::a, Manifold::c},
    {Field::P, Manifold::b, Manifold::d},
}};

const std::array<double, 3>& scheme_amps(const PolarizationScheme& s, Field f) {
  switch (f) {
    case Field::C1: return s.c1;
    case Field::C2: return s.c2;
    default: return s.p;
  }
}

std::string m_name(int m) {
  if (m > 0) return "+" + std::to_string(m);
  return std::to_string(m);
}

/// New-basis state names per manifold, in the row order of the
/// transformation matrix built below.
std::vector<std::string> transformed_names(Manifold man) {
  if (manifold_f(man) == 1) return {"0", "1+", "1-"};
  if (man == Manifold::d) return {"alpha", "beta", "1+", "1-", "2-"};
  return {"0", "1+", "1-", "2+", "2-"};
}

/// Rows are new states, columns are m = -F..F.
Eigen::MatrixXd transform_matrix(Manifold man) {
  const int f = manifold_f(man);
  const int dim = 2 * f + 1;
  const double s2 = 1.0 / std::sqrt(2.0);
  auto col = [f](int m) { return m + f; };

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(dim, dim);
  int row = 0;
  u(row++, col(0)) = 1.0;
  for (int m = 1; m <= f; ++m) {
    u(row, col(m)) = s2;
    u(row++, col(-m)) = s2;
    u(row, col(m)) = s2;
    u(row++, col(-m)) = -s2;
  }
  // Row order so far: 0, 1+, 1-, (2+, 2-).

  if (man == Manifold::d) {
    const double h = 0.5;
    const double r3 = std::sqrt(3.0) / 2.0;
    Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(dim, dim);
    mix(0, 0) = h;   // alpha = 1/2 |0> + sqrt(3)/2 |2,+>
    mix(0, 3) = r3;
    mix(1, 0) = r3;  // beta = sqrt(3)/2 |0> - 1/2 |2,+>
    mix(1, 3) = -h;
    mix(2, 1) = 1.0;  // 1+
    mix(3, 2) = 1.0;  // 1-
    mix(4, 4) = 1.0;  // 2-
    u = mix * u;
  }

  if ((u.transpose() * u - Eigen::MatrixXd::Identity(dim, dim)).norm() >
      1e-12 * dim) {
    throw Error("basis transformation is not orthogonal");
  }
  return u;
}

}  // namespace

int manifold_f(Manifold m) { return m == Manifold::a ? 1 : 2; }

bool is_ground(Manifold m) { return m == Manifold::a || m == Manifold::b; }

char manifold_char(Manifold m) {
  switch (m) {
    case Manifold::a: return 'a';
    case Manifold::b: return 'b';
    case Manifold::c: return 'c';
    default: return 'd';
  }
}

double clebsch_gordan_general(int j1, int m1, int j2, int m2, int j, int m) {
  if (m1 + m2 != m) return 0.0;
  if (j < std::abs(j1 - j2) || j > j1 + j2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m) > j) return 0.0;

  const double prefactor =
      std::sqrt((2.0 * j + 1.0) * factorial(j1 + j2 - j) *
                factorial(j1 - j2 + j) * factorial(-j1 + j2 + j) /
                factorial(j1 + j2 + j + 1)) *
      std::sqrt(factorial(j + m) * factorial(j - m) * factorial(j1 - m1) *
                factorial(j1 + m1) * factorial(j2 - m2) * factorial(j2 + m2));

  double sum = 0.0;
  const int kmax = std::min({j1 + j2 - j, j1 - m1, j2 + m2});
  for (int k = 0; k <= kmax; ++k) {
    const int t1 = j1 + j2 - j - k;
    const int t2 = j1 - m1 - k;
    const int t3 = j2 + m2 - k;
    const int t4 = j - j2 + m1 + k;
    const int t5 = j - j1 - m2 + k;
    if (t1 < 0 || t2 < 0 || t3 < 0 || t4 < 0 || t5 < 0) continue;
    sum += (k % 2 == 0 ? 1.0 : -1.0) /
           (factorial(k) * factorial(t1) * factorial(t2) * factorial(t3) *
            factorial(t4) * factorial(t5));
  }
  return prefactor * sum;
}

double clebsch_gordan(int f, int m, int q, int fp, int mp) {
  if (f < 0 || fp < 0 || std::abs(m) > f || std::abs(mp) > fp ||
      std::abs(q) > 1) {
    throw InvalidQuantumNumbers("clebsch_gordan: arguments out of range");
  }
  return clebsch_gordan_general(f, m, 1, q, fp, mp);
}

void PolarizationScheme::validate() const {
  for (const auto* a : {&c1, &c2, &p}) {
    double total = 0.0;
    for (double x : *a) total += x * x;
    if (std::abs(total - 1.0) > 1e-12) {
      throw Error("polarization amplitudes must have unit total intensity");
    }
  }
}

PolarizationScheme orthogonal_scheme() {
  const double s2 = 1.0 / std::sqrt(2.0);
  PolarizationScheme s;
  s.c1 = {s2, 0.0, s2};
  s.c2 = {0.0, 1.0, 0.0};
  s.p = {0.0, 1.0, 0.0};
  return s;
}

PolarizationScheme parallel_scheme() {
  PolarizationScheme s;
  s.c1 = {0.0, 1.0, 0.0};
  s.c2 = {0.0, 1.0, 0.0};
  s.p = {0.0, 1.0, 0.0};
  return s;
}

CouplingGraph build_coupling_graph(const PolarizationScheme& scheme) {
  scheme.validate();
  CouplingGraph g;
  g.transformed = false;

  std::array<int, 4> first{};
  for (Manifold man : {Manifold::a, Manifold::b, Manifold::c, Manifold::d}) {
    first[static_cast<int>(man)] = static_cast<int>(g.states.size());
    const int f = manifold_f(man);
    for (int m = -f; m <= f; ++m) g.states.push_back({man, m_name(m)});
  }
  auto index_of = [&](Manifold man, int m) {
    return first[static_cast<int>(man)] + m + manifold_f(man);
  };

  for (const FieldSpec& fs : kFieldSpecs) {
    const auto& pol = scheme_amps(scheme, fs.field);
    const int fl = manifold_f(fs.lower);
    const int fu = manifold_f(fs.upper);
    for (int m = -fl; m <= fl; ++m) {
      for (int q = -1; q <= 1; ++q) {
        if (pol[q + 1] == 0.0 || std::abs(m + q) > fu) continue;
        const double amp = pol[q + 1] * clebsch_gordan(fl, m, q, fu, m + q);
        if (std::abs(amp) < 1e-15) continue;
        g.edges.push_back(
            {index_of(fs.lower, m), index_of(fs.upper, m + q), fs.field, amp});
      }
    }
  }
  return g;
}

CouplingGraph transform_basis(const CouplingGraph& graph) {
  if (graph.transformed) throw Error("graph is already in the new basis");

  CouplingGraph out;
  out.transformed = true;

  std::array<int, 4> first_old{}, first_new{};
  std::array<Eigen::MatrixXd, 4> u;
  {
    int old_idx = 0, new_idx = 0;
    for (Manifold man : {Manifold::a, Manifold::b, Manifold::c, Manifold::d}) {
      const int mi = static_cast<int>(man);
      first_old[mi] = old_idx;
      first_new[mi] = new_idx;
      u[mi] = transform_matrix(man);
      for (const auto& name : transformed_names(man)) {
        out.states.push_back({man, name});
      }
      old_idx += 2 * manifold_f(man) + 1;
      new_idx += 2 * manifold_f(man) + 1;
    }
  }

  for (const FieldSpec& fs : kFieldSpecs) {
    const int li = static_cast<int>(fs.lower);
    const int ui = static_cast<int>(fs.upper);
    const int nl = 2 * manifold_f(fs.lower) + 1;
    const int nu = 2 * manifold_f(fs.upper) + 1;

    Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(nu, nl);
    for (const ZEdge& e : graph.edges) {
      if (e.field != fs.field) continue;
      amp(e.upper - first_old[ui], e.lower - first_old[li]) += e.amplitude;
    }

    const Eigen::MatrixXd amp_new = u[ui] * amp * u[li].transpose();
    for (int r = 0; r < nu; ++r) {
      for (int c = 0; c < nl; ++c) {
        if (std::abs(amp_new(r, c)) < 1e-12) continue;
        out.edges.push_back(
            {first_new[li] + c, first_new[ui] + r, fs.field, amp_new(r, c)});
      }
    }
  }
  return out;
}

Decomposition decompose(const CouplingGraph& graph) {
  Decomposition d;
  d.graph = graph;

  const int n = static_cast<int>(graph.states.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };

  for (auto& st : d.graph.states) st.degree = 0;
  for (const ZEdge& e : graph.edges) {
    parent[find(e.lower)] = find(e.upper);
    d.graph.states[e.lower].degree++;
    d.graph.states[e.upper].degree++;
  }

  std::vector<int> comp_of(n);
  std::vector<Component> comps;
  {
    std::vector<int> root_to_comp(n, -1);
    for (int i = 0; i < n; ++i) {
      const int r = find(i);
      if (root_to_comp[r] < 0) {
        root_to_comp[r] = static_cast<int>(comps.size());
        comps.emplace_back();
      }
      comp_of[i] = root_to_comp[r];
      comps[comp_of[i]].states.push_back(i);
    }
  }
  for (int ei = 0; ei < static_cast<int>(graph.edges.size()); ++ei) {
    comps[comp_of[graph.edges[ei].lower]].edges.push_back(ei);
  }

  auto upper_has_coupling_edge = [&](const Component& c, int state) {
    for (int ei : c.edges) {
      const ZEdge& e = graph.edges[ei];
      if (e.field == Field::P) continue;
      if (e.lower == state || e.upper == state) return true;
    }
    return false;
  };

  for (Component& c : comps) {
    int n_c1 = 0, n_c2 = 0;
    std::vector<int> probe_edges;
    for (int ei : c.edges) {
      switch (graph.edges[ei].field) {
        case Field::C1: ++n_c1; break;
        case Field::C2: ++n_c2; break;
        case Field::P: probe_edges.push_back(ei); break;
      }
    }

    if (c.edges.empty()) {
      c.kind = ComponentKind::Isolated;
      const int st = c.states.front();
      if (is_ground(graph.states[st].manifold)) d.dark_states.push_back(st);
    } else if (n_c1 == 0 && n_c2 == 0) {
      c.kind = ComponentKind::ProbeOnly;
      for (int ei : probe_edges) d.uncoupled_edges.push_back(ei);
    } else if (probe_edges.empty()) {
      c.kind = ComponentKind::VOnly;
    } else if (n_c1 == 1 && n_c2 == 1 && probe_edges.size() == 1 &&
               c.states.size() == 4) {
      c.kind = ComponentKind::NConfiguration;
    } else if (n_c1 == 1 && n_c2 == 1 && probe_edges.size() == 2) {
      // The probe edge landing on an upper state the coupling fields do not
      // touch only scatters the probe; treat it as an uncoupled absorption.
      std::vector<int> extras;
      for (int ei : probe_edges) {
        if (!upper_has_coupling_edge(c, graph.edges[ei].upper)) {
          extras.push_back(ei);
        }
      }
      if (extras.size() == 1) {
        c.kind = ComponentKind::NPlusExtraEdge;
        c.extra_probe_edge = extras.front();
        d.uncoupled_edges.push_back(extras.front());
      } else {
        c.kind = ComponentKind::Other;
      }
    } else {
      c.kind = ComponentKind::Other;
    }
  }

  d.components = std::move(comps);
  std::sort(d.uncoupled_edges.begin(), d.uncoupled_edges.end());
  return d;
}

EffectiveParams effective_n_parameters(const Decomposition& decomp,
                                       double base_omega1,
                                       double base_omega2) {
  EffectiveParams out;
  for (const Component& c : decomp.components) {
    if (c.kind != ComponentKind::NConfiguration &&
        c.kind != ComponentKind::NPlusExtraEdge) {
      continue;
    }
    double a1 = 0.0, a2 = 0.0;
    for (int ei : c.edges) {
      const ZEdge& e = decomp.graph.edges[ei];
      if (e.field == Field::C1) a1 = std::abs(e.amplitude);
      if (e.field == Field::C2) a2 = std::abs(e.amplitude);
    }
    out.subsystems.push_back({base_omega1 * a1, base_omega2 * a2, 0.0, 0.0});
  }
  if (out.subsystems.empty()) {
    throw NotAnNConfiguration("decomposition has no N-type component");
  }

  double lo = 1e300, hi = 0.0, sum = 0.0;
  for (const DriveConfig& cfg : out.subsystems) {
    const double d13 = std::hypot(cfg.omega1, cfg.omega2);
    lo = std::min(lo, d13);
    hi = std::max(hi, d13);
    sum += d13;
  }
  out.delta13_mean = sum / static_cast<double>(out.subsystems.size());
  out.delta13_spread = out.delta13_mean > 0.0 ? (hi - lo) / out.delta13_mean : 0.0;
  return out;
}

std::optional<Rational> as_rational(double x, long long max_den, double tol) {
  // Continued-fraction expansion with bounded denominator.
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int i = 0; i < 64; ++i) {
    const double fa = std::floor(v);
    if (fa > 9e17 || fa < -9e17) break;
    const long long a = static_cast<long long>(fa);
    const long long p2 = a * p1 + p0;
    const long long q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < tol) {
      return Rational{p1, q1};
    }
    const double frac = v - fa;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (q1 > 0 &&
      std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < tol) {
    return Rational{p1, q1};
  }
  return std::nullopt;
}

}  // namespace nspec::zeeman
