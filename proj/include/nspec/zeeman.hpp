#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nspec/dressed.hpp"
#include "nspec/errors.hpp"

namespace nspec::zeeman {

/// Hyperfine manifolds of the modeled system. a and b are ground
/// manifolds; c and d are excited.
enum class Manifold { a, b, c, d };

/// Total angular momentum per manifold: a has F=1, the rest F=2.
int manifold_f(Manifold m);
bool is_ground(Manifold m);
char manifold_char(Manifold m);

enum class Field { C1, C2, P };

/// Clebsch-Gordan coefficient <F m; 1 q | F' m'> in the Condon-Shortley
/// convention. Zero unless m' = m + q and |F-1| <= F' <= F+1. Throws
/// InvalidQuantumNumbers for out-of-range m, m' or q.
double clebsch_gordan(int f, int m, int q, int fp, int mp);

/// General <j1 m1; j2 m2 | J M> (integer angular momenta).
double clebsch_gordan_general(int j1, int m1, int j2, int m2, int j, int m);

/// Spherical polarization amplitudes (q = -1, 0, +1) per field, each
/// normalized to unit total intensity.
struct PolarizationScheme {
  std::array<double, 3> c1{};
  std::array<double, 3> c2{};
  std::array<double, 3> p{};

  void validate() const;
};

/// C2 and P linear along the quantization axis (pi), C1 linear orthogonal
/// to it (equal-weight sigma+ / sigma- superposition).
PolarizationScheme orthogonal_scheme();

/// All three fields linear along the quantization axis (pi).
PolarizationScheme parallel_scheme();

/// A Zeeman sublevel, either |m>_X or a named superposition after the
/// basis change ("0", "1+", "1-", "2+", "2-", "alpha", "beta").
struct ZState {
  Manifold manifold;
  std::string name;
  int degree = 0;  ///< filled by decompose()
};

struct ZEdge {
  int lower = 0;  ///< state index (ground manifold side)
  int upper = 0;
  Field field = Field::P;
  double amplitude = 0.0;  ///< CG coefficient x polarization amplitude
};

struct CouplingGraph {
  std::vector<ZState> states;
  std::vector<ZEdge> edges;
  bool transformed = false;
};

/// One edge per allowed (state, q, field) combination with nonzero
/// amplitude, in the angular-momentum basis. Field assignments:
/// C1 drives a-d, C2 drives a-c, P probes b-d.
CouplingGraph build_coupling_graph(const PolarizationScheme& scheme);

/// Orthogonal change of basis |m,±> = (|m> ± |-m>)/sqrt(2) in every
/// manifold, plus the d-manifold mixing
///   |alpha> = 1/2 |0> + sqrt(3)/2 |2,+>
///   |beta>  = sqrt(3)/2 |0> - 1/2 |2,+>.
/// The transformation matrix is verified orthogonal to 1e-12.
CouplingGraph transform_basis(const CouplingGraph& graph);

enum class ComponentKind {
  NConfiguration,   ///< 4 states, one edge per field
  NPlusExtraEdge,   ///< N configuration plus one additional probe edge
  VOnly,            ///< driven V with no probe attached
  ProbeOnly,        ///< probe edge(s) touching no coupling field
  Isolated,         ///< single state with no edges
  Other
};

struct Component {
  std::vector<int> states;
  std::vector<int> edges;   ///< indices into graph.edges
  ComponentKind kind = ComponentKind::Other;
  int extra_probe_edge = -1;  ///< for NPlusExtraEdge
};

struct Decomposition {
  CouplingGraph graph;
  std::vector<Component> components;
  std::vector<int> uncoupled_edges;  ///< probe edges not riding on a driven system
  std::vector<int> dark_states;      ///< degree-0 ground states
};

/// Connected-component analysis with classification. Probe edges in
/// probe-only components, and the extra probe edge of an N-plus-extra
/// component, are reported as uncoupled absorptions.
Decomposition decompose(const CouplingGraph& graph);

struct EffectiveParams {
  std::vector<DriveConfig> subsystems;  ///< one per N-type component
  double delta13_mean = 0.0;
  double delta13_spread = 0.0;  ///< (max - min) / mean
};

/// Per-subsystem Rabi frequencies: base Rabi frequency of each coupling
/// field scaled by that subsystem's effective coupling amplitude. Throws
/// NotAnNConfiguration if the decomposition holds no N-type component.
EffectiveParams effective_n_parameters(const Decomposition& decomp,
                                       double base_omega1,
                                       double base_omega2);

/// Exact small-denominator rational approximation (continued fractions);
/// empty if nothing within `tol` has denominator <= max_den.
struct Rational {
  long long num = 0;
  long long den = 1;
};
std::optional<Rational> as_rational(double x, long long max_den = 1000,
                                    double tol = 1e-9);

}  // namespace nspec::zeeman
