// Command-line front end: dressed-state eigensolutions, spectra,
// trajectories, weight curves, power-series fits, Zeeman decompositions and
// the optical-Bloch steady-state oracle, emitted as CSV or JSON.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nspec/dressed.hpp"
#include "nspec/fitting.hpp"
#include "nspec/obe.hpp"
#include "nspec/spectrum.hpp"
#include "nspec/zeeman.hpp"

namespace {

using nlohmann::json;

/// Shortest stable decimal rendering; identical runs yield identical bytes.
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// Flag/usage error: exit status 2, message plus usage text on stderr.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-subcommand argument store. Values arrive from flags at parse time;
/// merge_config() then fills in anything missing from the JSON config file,
/// so flags always override file values. JSON keys use underscores where
/// flags use dashes (e.g. --h-uc / "h_uc").
class SubArgs {
 public:
  explicit SubArgs(CLI::App* sub) : sub_(sub) {
    sub->add_option("--config", config_path_,
                    "JSON config file; explicit flags take precedence");
    sub->add_option("-o,--output", output_path_,
                    "output file (default: stdout)");
  }

  void opt(const std::string& key, const std::string& desc) {
    sub_->add_option_function<double>(
        "--" + flag_name(key), [this, key](double v) { num_[key] = v; }, desc);
  }

  void sopt(const std::string& key, const std::string& desc) {
    sub_->add_option_function<std::string>(
        "--" + flag_name(key),
        [this, key](const std::string& v) { str_[key] = v; }, desc);
  }

  void merge_config() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path_);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw std::runtime_error("bad config file " + config_path_ + ": " +
                               e.what());
    }
    for (const auto& [k, v] : j.items()) {
      if (v.is_number()) {
        num_.emplace(k, v.get<double>());  // no-op when set by a flag
      } else if (v.is_string()) {
        str_.emplace(k, v.get<std::string>());
      } else {
        throw std::runtime_error("config key '" + k +
                                 "' must be a number or string");
      }
    }
  }

  bool has(const std::string& key) const { return num_.count(key) > 0; }

  double get(const std::string& key, double dflt) const {
    auto it = num_.find(key);
    return it == num_.end() ? dflt : it->second;
  }

  double req(const std::string& key) const {
    auto it = num_.find(key);
    if (it == num_.end()) usage("missing required option --" + flag_name(key));
    return it->second;
  }

  std::string sreq(const std::string& key) const {
    auto it = str_.find(key);
    if (it == str_.end()) usage("missing required option --" + flag_name(key));
    return it->second;
  }

  std::string sget(const std::string& key, const std::string& dflt) const {
    auto it = str_.find(key);
    return it == str_.end() ? dflt : it->second;
  }

  [[noreturn]] void usage(const std::string& msg) const {
    throw UsageError(msg + "\n" + sub_->help());
  }

  std::ostream& out() {
    if (!output_path_.empty() && !file_.is_open()) {
      file_.open(output_path_);
      if (!file_) {
        throw std::runtime_error("cannot open output file: " + output_path_);
      }
    }
    return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout;
  }

  std::vector<double> grid(double d_start, double d_stop, double d_step) const {
    const double start = get("start", d_start);
    const double stop = get("stop", d_stop);
    const double step = get("step", d_step);
    if (step <= 0) usage("--step must be > 0");
    if (stop < start) usage("--stop must be >= --start");
    std::vector<double> g;
    for (double x = start; x <= stop + step * 1e-9; x += step) g.push_back(x);
    if (g.empty()) usage("empty grid");
    return g;
  }

 private:
  static std::string flag_name(std::string key) {
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    return key;
  }

  CLI::App* sub_;
  std::map<std::string, double> num_;
  std::map<std::string, std::string> str_;
  std::string config_path_, output_path_;
  std::ofstream file_;
};

void add_drive_opts(SubArgs& a) {
  a.opt("omega1", "Rabi frequency of the a-d coupling field, MHz");
  a.opt("omega2", "Rabi frequency of the a-c coupling field, MHz");
  a.opt("delta1", "detuning of the a-d coupling field, MHz (default 0)");
  a.opt("delta2", "detuning of the a-c coupling field, MHz (default 0)");
}

nspec::DriveConfig drive_from(const SubArgs& a) {
  return {a.req("omega1"), a.req("omega2"), a.get("delta1", 0.0),
          a.get("delta2", 0.0)};
}

void cmd_eigen(SubArgs& a) {
  const nspec::DressedSolution sol = nspec::solve_dressed(drive_from(a));
  std::ostream& out = a.out();
  out << "nu,energy_mhz,weight,v_a,v_c,v_d\n";
  for (int nu = 0; nu < 3; ++nu) {
    out << (nu + 1) << ',' << fmt(sol.energies[nu]) << ','
        << fmt(sol.weights[nu]) << ',' << fmt(sol.vectors(0, nu)) << ','
        << fmt(sol.vectors(1, nu)) << ',' << fmt(sol.vectors(2, nu)) << '\n';
  }
}

void cmd_spectrum(SubArgs& a) {
  nspec::SpectrumModel model;
  model.drive = {a.get("omega1", 0.0), a.get("omega2", 0.0),
                 a.get("delta1", 0.0), a.get("delta2", 0.0)};
  model.lineshape.fwhm = a.get("fwhm", 6.0);
  model.lineshape.broadening_factor = a.get("broadening", 1.0);
  model.uncoupled_height = a.get("h_uc", 0.0);
  model.uncoupled_center = a.get("uncoupled_center", 0.0);
  model.global_shift = a.get("shift", 0.0);
  model.coupled_scale = a.get("scale", 1.0);
  const auto g = a.grid(-80.0, 80.0, 0.2);
  const auto v = nspec::synthesize(model, g);
  std::ostream& out = a.out();
  out << "delta_p_mhz,absorption\n";
  for (size_t i = 0; i < g.size(); ++i) {
    out << fmt(g[i]) << ',' << fmt(v[i]) << '\n';
  }
}

void cmd_trajectory(SubArgs& a) {
  const auto g = a.grid(-80.0, 80.0, 0.5);
  const nspec::Trajectory t = nspec::trajectory_vs_delta2(
      a.req("omega1"), a.req("omega2"), a.get("delta1", 0.0), g);
  std::ostream& out = a.out();
  out << "delta2_mhz,e1_mhz,e2_mhz,e3_mhz\n";
  for (size_t i = 0; i < t.delta2.size(); ++i) {
    out << fmt(t.delta2[i]) << ',' << fmt(t.e1[i]) << ',' << fmt(t.e2[i])
        << ',' << fmt(t.e3[i]) << '\n';
  }
}

void cmd_weights(SubArgs& a) {
  const auto g = a.grid(0.0, 3.0, 0.01);
  const nspec::WeightCurves w = nspec::weights_vs_ratio(g);
  std::ostream& out = a.out();
  out << "ratio,e1_norm,e2_norm,e3_norm,a1,a2,a3\n";
  for (size_t i = 0; i < w.ratio.size(); ++i) {
    out << fmt(w.ratio[i]) << ',' << fmt(w.e1[i]) << ',' << fmt(w.e2[i]) << ','
        << fmt(w.e3[i]) << ',' << fmt(w.a1[i]) << ',' << fmt(w.a2[i]) << ','
        << fmt(w.a3[i]) << '\n';
  }
}

void cmd_fit(SubArgs& a) {
  const std::string path = a.sreq("input");
  const nspec::fit::PowerSeries series = nspec::fit::load_series_file(path);
  const std::string model_name = a.sget("model", "splitting");

  nspec::fit::FitResult r;
  std::unique_ptr<nspec::fit::Model> model;
  if (model_name == "splitting") {
    r = nspec::fit::fit_splitting(series);
    model = std::make_unique<nspec::fit::SplittingModel>();
  } else if (model_name == "height") {
    const double omega1 = a.req("omega1");
    const double k = a.req("k");
    r = nspec::fit::fit_height(series, omega1, k);
    model = std::make_unique<nspec::fit::HeightModel>(omega1, k);
  } else {
    a.usage("--model must be 'splitting' or 'height'");
  }

  const int band_n = static_cast<int>(a.get("band_grid", 50.0));
  if (band_n < 2) a.usage("--band-grid must be >= 2");
  double pmax = 0.0;
  for (const auto& d : series) pmax = std::max(pmax, d.p2);
  std::vector<double> band_grid(band_n);
  for (int i = 0; i < band_n; ++i) band_grid[i] = pmax * i / (band_n - 1);
  const nspec::fit::Band band = nspec::fit::confidence_band(*model, r, band_grid);

  json out;
  out["model"] = model_name;
  for (int i = 0; i < r.params.size(); ++i) {
    out["params"][r.param_names[i]] = r.params[i];
  }
  out["covariance"] = {{r.covariance(0, 0), r.covariance(0, 1)},
                       {r.covariance(1, 0), r.covariance(1, 1)}};
  out["residual_norm"] = r.residual_norm;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  out["detuning_bias_bound_mhz"] = r.detuning_bias_bound;
  out["band"] = {{"p2_mw", band.p2},
                 {"center", band.center},
                 {"lower", band.lower},
                 {"upper", band.upper}};
  a.out() << out.dump(2) << '\n';
}

std::string field_name(nspec::zeeman::Field f) {
  switch (f) {
    case nspec::zeeman::Field::C1: return "C1";
    case nspec::zeeman::Field::C2: return "C2";
    default: return "P";
  }
}

std::string kind_name(nspec::zeeman::ComponentKind k) {
  using nspec::zeeman::ComponentKind;
  switch (k) {
    case ComponentKind::NConfiguration: return "n_configuration";
    case ComponentKind::NPlusExtraEdge: return "n_plus_extra_edge";
    case ComponentKind::VOnly: return "v_only";
    case ComponentKind::ProbeOnly: return "probe_only";
    case ComponentKind::Isolated: return "isolated";
    default: return "other";
  }
}

void cmd_zeeman(SubArgs& a) {
  namespace z = nspec::zeeman;
  const std::string scheme = a.sreq("scheme");
  z::CouplingGraph graph;
  if (scheme == "orthogonal") {
    graph = z::transform_basis(z::build_coupling_graph(z::orthogonal_scheme()));
  } else if (scheme == "parallel") {
    graph = z::build_coupling_graph(z::parallel_scheme());
  } else {
    a.usage("--scheme must be 'orthogonal' or 'parallel'");
  }
  const z::Decomposition d = z::decompose(graph);

  json out;
  out["scheme"] = scheme;
  for (const z::ZState& s : d.graph.states) {
    out["states"].push_back({{"manifold", std::string(1, manifold_char(s.manifold))},
                             {"name", s.name},
                             {"degree", s.degree}});
  }
  for (const z::ZEdge& e : d.graph.edges) {
    out["edges"].push_back({{"lower", e.lower},
                            {"upper", e.upper},
                            {"field", field_name(e.field)},
                            {"amplitude", e.amplitude},
                            {"amplitude_sq", e.amplitude * e.amplitude}});
  }
  for (const z::Component& c : d.components) {
    json jc = {{"kind", kind_name(c.kind)},
               {"states", c.states},
               {"edges", c.edges}};
    if (c.extra_probe_edge >= 0) jc["extra_probe_edge"] = c.extra_probe_edge;
    out["components"].push_back(jc);
  }
  out["uncoupled_edges"] = d.uncoupled_edges;
  out["dark_states"] = d.dark_states;

  try {
    const z::EffectiveParams eff = z::effective_n_parameters(
        d, a.get("omega1", 62.0), a.get("omega2", 44.0));
    json subs = json::array();
    for (const nspec::DriveConfig& s : eff.subsystems) {
      subs.push_back({{"omega1", s.omega1}, {"omega2", s.omega2}});
    }
    out["effective"] = {{"subsystems", subs},
                        {"delta13_mean_mhz", eff.delta13_mean},
                        {"delta13_spread", eff.delta13_spread}};
  } catch (const nspec::NotAnNConfiguration&) {
    // No N-type component in this scheme; omit the effective block.
  }
  a.out() << out.dump(2) << '\n';
}

void cmd_obe(SubArgs& a) {
  nspec::obe::DecayConfig decay;
  decay.gamma_d = a.get("gamma_d", decay.gamma_d);
  decay.gamma_c = a.get("gamma_c", decay.gamma_c);
  decay.branch_d_to_a = a.get("branch_d_to_a", decay.branch_d_to_a);
  decay.branch_d_to_b = a.get("branch_d_to_b", decay.branch_d_to_b);
  decay.branch_c_to_a = a.get("branch_c_to_a", decay.branch_c_to_a);
  decay.branch_c_to_b = a.get("branch_c_to_b", decay.branch_c_to_b);
  decay.repump = a.get("repump", decay.repump);
  decay.validate();
  const auto g = a.grid(-80.0, 80.0, 0.5);
  const auto v = nspec::obe::probe_absorption_spectrum(
      drive_from(a), decay, g, a.get("omega_p", 0.3));
  std::ostream& out = a.out();
  out << "delta_p_mhz,absorption\n";
  for (size_t i = 0; i < g.size(); ++i) {
    out << fmt(g[i]) << ',' << fmt(v[i]) << '\n';
  }
}

void add_grid_opts(SubArgs& a, const std::string& what) {
  a.opt("start", what + " grid start, MHz");
  a.opt("stop", what + " grid stop, MHz");
  a.opt("step", what + " grid step, MHz");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dressed-state energies and probe spectra of a driven "
               "four-level N system"};
  app.require_subcommand(1);
  std::vector<std::shared_ptr<SubArgs>> holders;

  auto make = [&](const std::string& name, const std::string& desc,
                  void (*run)(SubArgs&)) {
    CLI::App* sub = app.add_subcommand(name, desc);
    auto args = std::make_shared<SubArgs>(sub);
    holders.push_back(args);
    sub->callback([args, run] {
      args->merge_config();
      run(*args);
    });
    return args;
  };

  {
    auto a = make("eigen", "dressed energies, weights and eigenvectors",
                  cmd_eigen);
    add_drive_opts(*a);
  }
  {
    auto a = make("spectrum", "synthetic probe-absorption spectrum (CSV)",
                  cmd_spectrum);
    add_drive_opts(*a);
    add_grid_opts(*a, "probe detuning");
    a->opt("fwhm", "Lorentzian FWHM, MHz (default 6)");
    a->opt("broadening", "linewidth broadening factor (default 1)");
    a->opt("h_uc", "uncoupled-peak height (default 0)");
    a->opt("uncoupled_center", "uncoupled-peak center, MHz (default 0)");
    a->opt("shift", "global spectrum shift, MHz (default 0)");
    a->opt("scale", "scale of the dressed lines (default 1)");
  }
  {
    auto a = make("trajectory", "dressed energies swept over delta2 (CSV)",
                  cmd_trajectory);
    a->opt("omega1", "Rabi frequency of the a-d coupling field, MHz");
    a->opt("omega2", "Rabi frequency of the a-c coupling field, MHz");
    a->opt("delta1", "detuning of the a-d coupling field, MHz (default 0)");
    add_grid_opts(*a, "delta2");
  }
  {
    auto a = make("weights", "resonance weight curves vs omega2/omega1 (CSV)",
                  cmd_weights);
    add_grid_opts(*a, "ratio");
  }
  {
    auto a = make("fit", "power-series fit report (JSON)", cmd_fit);
    a->sopt("input", "CSV file: p2_mw,value[,sigma]");
    a->sopt("model", "'splitting' (default) or 'height'");
    a->opt("omega1", "fixed omega1 for the height model, MHz");
    a->opt("k", "fixed power-to-Rabi coefficient for the height model");
    a->opt("band_grid", "number of confidence-band samples (default 50)");
  }
  {
    auto a = make("zeeman", "Zeeman coupling-graph decomposition (JSON)",
                  cmd_zeeman);
    a->sopt("scheme", "'orthogonal' or 'parallel'");
    a->opt("omega1", "base C1 Rabi frequency, MHz (default 62)");
    a->opt("omega2", "base C2 Rabi frequency, MHz (default 44)");
  }
  {
    auto a = make("obe", "steady-state probe absorption oracle (CSV)",
                  cmd_obe);
    add_drive_opts(*a);
    add_grid_opts(*a, "probe detuning");
    a->opt("omega_p", "probe Rabi frequency, MHz (default 0.3)");
    a->opt("gamma_d", "total decay rate of d, MHz (default 6)");
    a->opt("gamma_c", "total decay rate of c, MHz (default 5.7)");
    a->opt("branch_d_to_a", "branching fraction d->a (default 0.5)");
    a->opt("branch_d_to_b", "branching fraction d->b (default 0.5)");
    a->opt("branch_c_to_a", "branching fraction c->a (default 1)");
    a->opt("branch_c_to_b", "branching fraction c->b (default 0)");
    a->opt("repump", "incoherent a->b transfer rate, MHz (default 0)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << app.help();
    return 2;
  } catch (const UsageError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
