#include "smm/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "smm/errors.hpp"

namespace smm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

double number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key, "must be finite");
  return x;
}

bool boolean(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key, "expected a string");
  return v.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Files written by one command; removed again unless committed.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
  }

  void write(const std::string& name, const std::string& body) {
    const fs::path target = dir_ / name;
    const fs::path tmp = dir_ / (name + ".part");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot open " + tmp.string() + " for writing");
      out << body;
      out.close();
      if (!out) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw Error("failed writing " + tmp.string());
      }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove(tmp, ec);
      throw Error("cannot move output into place: " + target.string());
    }
    files_.push_back(target);
  }

  void add(const FileSet& fset) {
    files_.insert(files_.end(), fset.files.begin(), fset.files.end());
  }

  FileSet commit(std::vector<std::string> warnings, bool ok) {
    committed_ = true;
    return {files_, std::move(warnings), ok};
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool committed_ = false;
};

json manifest_header(const std::string& scenario, const std::string& csv) {
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"scenario", scenario},
              {"csv", csv},
              {"timestamp", utc_timestamp()}};
}

json resolved_json(const ScenarioConfig& cfg) {
  const OpenSystem sys = cfg.resolve();
  const SystemParams sp = cfg.system_params();
  const auto& d = sys.dressed;
  json occupation{{"strategy", strategy_name(sys.bath.strategy)}};
  if (const auto* eq = std::get_if<ExactQuadrature>(&sys.bath.strategy)) {
    occupation["ir_cutoff"] = eq->ir_cutoff;
    occupation["omega_max"] =
        eq->omega_max.value_or(std::max(sys.bath.omega0, sys.omega + d.omega_s) + 50.0 * sys.bath.lambda);
  }
  return json{{"omega_so", sp.omega_so},
              {"omega", sp.omega},
              {"d_eps", sp.d_eps},
              {"alpha", sp.alpha},
              {"Delta_so", d.delta_so},
              {"omega_s", d.omega_s},
              {"delta_plus", d.delta_plus},
              {"delta_minus", d.delta_minus},
              {"delta_0", d.delta_zero},
              {"u2", sys.bath.u2},
              {"lambda", sys.bath.lambda},
              {"omega_0", sys.bath.omega0},
              {"temperature", sys.bath.temperature},
              {"occupation", occupation}};
}

json tolerances_json(const ScenarioConfig& cfg) {
  const EvolveConfig ec = cfg.evolve_config();
  json rate_source = std::holds_alternative<PrecomputedGrid>(ec.rate_source)
                         ? json{{"kind", "grid"}, {"spacing", std::get<PrecomputedGrid>(ec.rate_source).spacing}}
                         : json{{"kind", "on_the_fly"}};
  return json{{"ode_abs", ec.step.abs_tol},
              {"ode_rel", ec.step.rel_tol},
              {"initial_step", ec.step.initial_step},
              {"min_step", ec.step.min_step},
              {"max_step", ec.step.max_step},
              {"rate_source", rate_source},
              {"trace", InvariantReport::kTraceLimit},
              {"hermiticity", InvariantReport::kHermiticityLimit},
              {"purity_excess", InvariantReport::kPurityExcess},
              {"eigenvalue_floor", InvariantReport::kEigenvalueFloor},
              {"path_deviation", verify::Tolerances::paths_abs},
              {"entropy_path_deviation", verify::Tolerances::entropy_paths_abs}};
}

json invariants_json(const Trajectory& t) {
  const auto& inv = t.invariants;
  return json{
      {"trace", {{"max", inv.max_trace_error}, {"limit", InvariantReport::kTraceLimit}, {"pass", inv.trace_ok()}}},
      {"hermiticity",
       {{"max", inv.max_hermiticity_error}, {"limit", InvariantReport::kHermiticityLimit}, {"pass", inv.hermiticity_ok()}}},
      {"purity",
       {{"max", inv.max_purity}, {"limit", 1.0 + InvariantReport::kPurityExcess}, {"pass", inv.purity_ok()}}},
      {"positivity",
       {{"min_eigenvalue", inv.min_eigenvalue}, {"limit", InvariantReport::kEigenvalueFloor}, {"pass", inv.positivity_ok()}}},
      {"hermitization_correction", inv.max_hermitization_correction},
      {"steps", t.steps}};
}

json report_json(const verify::OracleReport& r) {
  json j{{"oracle", r.oracle},
         {"max_abs", r.max_abs_deviation},
         {"max_rel", r.max_rel_deviation},
         {"tolerance", r.tolerance}};
  j["pass"] = r.pass ? json(*r.pass) : json(nullptr);
  return j;
}

std::string manifest_name(const std::string& stem) { return stem + ".manifest.json"; }

// Run closures in parallel and rethrow the first failure.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  if (v == 0.0) v = 0.0;  // no negative zero
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(PathChoice p) {
  switch (p) {
    case PathChoice::ODE: return "ode";
    case PathChoice::Analytic: return "analytic";
    case PathChoice::Both: return "both";
  }
  return "?";
}

PathChoice parse_path(const std::string& s) {
  if (s == "ode") return PathChoice::ODE;
  if (s == "analytic") return PathChoice::Analytic;
  if (s == "both") return PathChoice::Both;
  throw InvalidArgument("path must be ode, analytic or both, got '" + s + "'");
}

OccupationStrategy parse_strategy(const std::string& s) {
  if (s == "resonant") return ResonantApprox{};
  if (s == "quadrature") return ExactQuadrature{};
  throw InvalidArgument("strategy must be resonant or quadrature, got '" + s + "'");
}

double ScenarioConfig::Bath::temperature_in_lambda(double omega_s) const {
  return temperature_unit == "omega_s" ? temperature * omega_s : temperature;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  reject_unknown(j, {"name", "system", "bath", "run"}, "");
  ScenarioConfig c;
  if (j.contains("name")) {
    c.name = text(j, "name", "");
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
      throw ConfigError("name", "must be a plain file stem");
    }
  }

  if (!j.contains("system")) throw ConfigError("system", "block is required");
  const json& s = j.at("system");
  reject_unknown(s, {"omega_so", "d_eps", "delta_ratio", "omega_s", "drive"}, "system");
  if (s.contains("omega_so")) c.system.omega_so = number(s, "omega_so", "system");
  if (s.contains("d_eps")) c.system.d_eps = number(s, "d_eps", "system");
  if (s.contains("delta_ratio")) c.system.delta_ratio = number(s, "delta_ratio", "system");
  if (s.contains("omega_s")) c.system.omega_s = number(s, "omega_s", "system");
  if (s.contains("drive")) c.system.drive = number(s, "drive", "system");

  if (j.contains("bath")) {
    const json& b = j.at("bath");
    reject_unknown(b, {"u2", "detuning", "temperature", "temperature_unit", "strategy", "ir_cutoff", "omega_max"},
                   "bath");
    if (b.contains("u2")) c.bath.u2 = number(b, "u2", "bath");
    if (b.contains("detuning")) c.bath.detuning = number(b, "detuning", "bath");
    if (b.contains("temperature")) c.bath.temperature = number(b, "temperature", "bath");
    if (b.contains("temperature_unit")) c.bath.temperature_unit = text(b, "temperature_unit", "bath");
    if (b.contains("strategy")) {
      try {
        c.bath.strategy = parse_strategy(text(b, "strategy", "bath"));
      } catch (const InvalidArgument& e) {
        throw ConfigError("bath.strategy", e.what());
      }
    }
    auto* eq = std::get_if<ExactQuadrature>(&c.bath.strategy);
    for (const char* key : {"ir_cutoff", "omega_max"}) {
      if (b.contains(key) && !eq) throw ConfigError(std::string("bath.") + key, "only valid with strategy quadrature");
    }
    if (b.contains("ir_cutoff")) eq->ir_cutoff = number(b, "ir_cutoff", "bath");
    if (b.contains("omega_max")) eq->omega_max = number(b, "omega_max", "bath");
  }

  if (j.contains("run")) {
    const json& r = j.at("run");
    reject_unknown(r,
                   {"t_max", "output_step", "theta", "phi", "include_nl", "include_lamb", "path", "rates",
                    "entropy", "tolerance", "rate_grid_spacing"},
                   "run");
    if (r.contains("t_max")) c.run.t_max = number(r, "t_max", "run");
    if (r.contains("output_step")) c.run.output_step = number(r, "output_step", "run");
    if (r.contains("theta")) c.run.theta = number(r, "theta", "run");
    if (r.contains("phi")) c.run.phi = number(r, "phi", "run");
    if (r.contains("include_nl")) c.run.include_nl = boolean(r, "include_nl", "run");
    if (r.contains("include_lamb")) c.run.include_lamb = boolean(r, "include_lamb", "run");
    if (r.contains("path")) {
      try {
        c.run.path = parse_path(text(r, "path", "run"));
      } catch (const InvalidArgument& e) {
        throw ConfigError("run.path", e.what());
      }
    }
    if (r.contains("rates")) c.run.rates = boolean(r, "rates", "run");
    if (r.contains("entropy")) c.run.entropy = boolean(r, "entropy", "run");
    if (r.contains("tolerance")) c.run.tolerance = number(r, "tolerance", "run");
    if (r.contains("rate_grid_spacing")) c.run.rate_grid_spacing = number(r, "rate_grid_spacing", "run");
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

json ScenarioConfig::to_json() const {
  json s{{"drive", system.drive}};
  if (system.omega_so) s["omega_so"] = *system.omega_so;
  if (system.d_eps) s["d_eps"] = *system.d_eps;
  if (system.delta_ratio) s["delta_ratio"] = *system.delta_ratio;
  if (system.omega_s) s["omega_s"] = *system.omega_s;
  json b{{"u2", bath.u2},
         {"detuning", bath.detuning},
         {"temperature", bath.temperature},
         {"temperature_unit", bath.temperature_unit},
         {"strategy", strategy_name(bath.strategy)}};
  if (const auto* eq = std::get_if<ExactQuadrature>(&bath.strategy)) {
    b["ir_cutoff"] = eq->ir_cutoff;
    if (eq->omega_max) b["omega_max"] = *eq->omega_max;
  }
  json r{{"t_max", run.t_max},         {"output_step", run.output_step}, {"theta", run.theta},
         {"phi", run.phi},             {"include_nl", run.include_nl},   {"include_lamb", run.include_lamb},
         {"path", to_string(run.path)}, {"rates", run.rates},            {"entropy", run.entropy},
         {"tolerance", run.tolerance}};
  if (run.rate_grid_spacing) r["rate_grid_spacing"] = *run.rate_grid_spacing;
  return json{{"name", name}, {"system", s}, {"bath", b}, {"run", r}};
}

void ScenarioConfig::validate() const {
  const bool lab = system.omega_so.has_value();
  const bool dressed = system.delta_ratio.has_value();
  if (lab == dressed) throw ConfigError("system", "give exactly one of omega_so or delta_ratio");
  if (lab && system.omega_s) throw ConfigError("system.omega_s", "only valid with delta_ratio");
  if (dressed && system.d_eps) throw ConfigError("system.d_eps", "only valid with omega_so");
  if (dressed && !system.omega_s) throw ConfigError("system.omega_s", "required with delta_ratio");
  if (!(system.drive > 0.0)) throw ConfigError("system.drive", "must be positive");
  if (lab && !(*system.omega_so > 0.0)) throw ConfigError("system.omega_so", "must be positive");
  if (system.d_eps && *system.d_eps < 0.0) throw ConfigError("system.d_eps", "must be non-negative");
  if (dressed && !(std::abs(*system.delta_ratio) <= 1.0)) {
    throw ConfigError("system.delta_ratio", "must lie in [-1, 1]");
  }
  if (system.omega_s && !(*system.omega_s > 0.0)) throw ConfigError("system.omega_s", "must be positive");

  if (bath.u2 < 0.0) throw ConfigError("bath.u2", "must be non-negative");
  if (bath.temperature < 0.0) throw ConfigError("bath.temperature", "must be non-negative");
  if (bath.temperature_unit != "omega_s" && bath.temperature_unit != "lambda") {
    throw ConfigError("bath.temperature_unit", "must be omega_s or lambda");
  }
  if (const auto* eq = std::get_if<ExactQuadrature>(&bath.strategy)) {
    if (!(eq->ir_cutoff > 0.0)) throw ConfigError("bath.ir_cutoff", "must be positive");
    if (eq->omega_max && !(*eq->omega_max > eq->ir_cutoff)) {
      throw ConfigError("bath.omega_max", "must exceed ir_cutoff");
    }
  }

  if (!(run.t_max > 0.0)) throw ConfigError("run.t_max", "must be positive");
  if (!(run.output_step > 0.0) || run.output_step > run.t_max) {
    throw ConfigError("run.output_step", "must lie in (0, t_max]");
  }
  if (!(run.theta >= 0.0 && run.theta <= kPi)) throw ConfigError("run.theta", "must lie in [0, pi]");
  if (!(run.phi >= 0.0 && run.phi <= 2.0 * kPi)) throw ConfigError("run.phi", "must lie in [0, 2 pi]");
  if (!(run.tolerance > 0.0)) throw ConfigError("run.tolerance", "must be positive");
  if (run.rate_grid_spacing && !(*run.rate_grid_spacing > 0.0 && *run.rate_grid_spacing <= 0.01)) {
    throw ConfigError("run.rate_grid_spacing", "must lie in (0, 0.01]");
  }
  try {
    resolve().bath.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("bath", e.what());
  }
}

SystemParams ScenarioConfig::system_params() const {
  if (system.omega_so) return SystemParams{*system.omega_so, system.drive, system.d_eps.value_or(0.0), 0.0};
  return SystemParams::from_dressed(*system.omega_s, *system.delta_ratio, system.drive);
}

OpenSystem ScenarioConfig::resolve() const {
  const SystemParams sp = system_params();
  sp.validate();
  OpenSystem sys;
  sys.dressed = dressed_params(sp);
  sys.omega = sp.omega;
  sys.bath.u2 = bath.u2;
  sys.bath.lambda = 1.0;
  sys.bath.omega0 = sp.omega + bath.detuning;
  sys.bath.temperature = bath.temperature_in_lambda(sys.dressed.omega_s);
  sys.bath.strategy = bath.strategy;
  return sys;
}

EvolveConfig ScenarioConfig::evolve_config() const {
  EvolveConfig ec;
  ec.t_max = run.t_max;
  ec.output_step = run.output_step;
  ec.step.abs_tol = run.tolerance;
  ec.step.rel_tol = run.tolerance;
  ec.include_nl = run.include_nl;
  ec.include_lamb_shift = run.include_lamb;
  if (run.rate_grid_spacing) {
    ec.rate_source = PrecomputedGrid{*run.rate_grid_spacing};
  } else if (std::holds_alternative<ExactQuadrature>(bath.strategy)) {
    ec.rate_source = PrecomputedGrid{1e-2};
  }
  return ec;
}

std::vector<std::string> ScenarioConfig::warnings() const {
  std::vector<std::string> w;
  const OpenSystem sys = resolve();
  if (sys.bath.u2 / sys.dressed.omega_s > 0.1) {
    w.push_back("u2/omega_s = " + label(sys.bath.u2 / sys.dressed.omega_s) +
                " > 0.1: outside the weak-coupling regime");
  }
  if (run.path != PathChoice::ODE && (run.include_nl || run.include_lamb)) {
    w.push_back("the analytic path ignores the non-Lindblad and Lamb-shift terms");
  }
  if (std::holds_alternative<ExactQuadrature>(bath.strategy)) {
    w.push_back("quadrature kernels are tabulated on a grid; expect long run times");
  }
  return w;
}

void Overrides::apply(ScenarioConfig& cfg) const {
  if (tolerance) cfg.run.tolerance = *tolerance;
  if (strategy) cfg.bath.strategy = *strategy;
  if (include_nl) cfg.run.include_nl = true;
  if (include_lamb) cfg.run.include_lamb = true;
  if (path) cfg.run.path = *path;
  cfg.validate();
}

ScenarioConfig figure_config(double delta_ratio, double detuning, double temperature) {
  ScenarioConfig c;
  c.system.delta_ratio = delta_ratio;
  c.system.omega_s = 100.0;
  c.system.drive = 500.0;
  c.bath.u2 = 0.1;
  c.bath.detuning = detuning;
  c.bath.temperature = temperature;
  c.bath.temperature_unit = "omega_s";
  return c;
}

bool ScenarioResult::invariants_ok() const {
  return (!ode || ode->invariants.all_ok()) && (!analytic || analytic->invariants.all_ok());
}

ScenarioResult simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult res;
  res.config = cfg;
  const OpenSystem sys = cfg.resolve();
  const EvolveConfig ec = cfg.evolve_config();
  const auto grid = uniform_grid(ec.t_max, ec.output_step);
  const KernelSource src = KernelSource::make(sys, ec.rate_source, ec.t_max + ec.step.max_step + 1e-9);
  const InitialAngles a = cfg.angles();
  if (cfg.run.path != PathChoice::Analytic) {
    res.ode = evolve(QubitState::from_angles(a.theta, a.phi), grid, ec, src);
  }
  if (cfg.run.path != PathChoice::ODE) {
    res.analytic = bloch_analytic(a, grid, src);
    res.analytic->config = ec;
  }
  if (res.ode && res.analytic) {
    res.bloch_deviation = verify::compare_trajectories(*res.ode, *res.analytic, verify::Tolerances::paths_abs);
    res.entropy_deviation =
        verify::compare_entropies(*res.ode, *res.analytic, verify::Tolerances::entropy_paths_abs);
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::string trajectory_csv(const ScenarioResult& r) {
  std::vector<std::pair<std::string, const Trajectory*>> paths;
  if (r.ode) paths.emplace_back(r.analytic ? "_ode" : "", &*r.ode);
  if (r.analytic) paths.emplace_back(r.ode ? "_analytic" : "", &*r.analytic);
  if (paths.empty()) throw InvalidArgument("scenario result has no trajectory");
  const bool rates = r.config.run.rates;
  const bool ent = r.config.run.entropy;

  std::string out = "lambda_t";
  for (const auto& [suffix, _] : paths) out += ",R_x" + suffix + ",R_y" + suffix + ",R_z" + suffix;
  if (rates) out += ",gamma_z,gamma_plus,gamma_minus";
  if (ent) {
    for (const auto& [suffix, _] : paths) out += ",entropy" + suffix;
  }
  out += '\n';

  const auto& base = paths.front().second->samples;
  for (std::size_t i = 0; i < base.size(); ++i) {
    out += format_number(base[i].t);
    for (const auto& [_, traj] : paths) {
      const auto b = traj->samples[i].state.bloch();
      for (int k = 0; k < 3; ++k) out += ',' + format_number(b[k]);
    }
    if (rates) {
      const auto& g = base[i].rates;
      out += ',' + format_number(g.gamma_z) + ',' + format_number(g.gamma_plus) + ',' + format_number(g.gamma_minus);
    }
    if (ent) {
      for (const auto& [_, traj] : paths) out += ',' + format_number(traj->samples[i].entropy);
    }
    out += '\n';
  }
  return out;
}

FileSet write_scenario(const ScenarioResult& r, const fs::path& out_dir, const std::string& stem) {
  OutputSet out(out_dir);
  const std::string csv = stem + ".csv";
  auto warnings = r.config.warnings();

  json m = manifest_header(r.config.name, csv);
  m["wall_time_s"] = r.wall_seconds;
  m["config"] = r.config.to_json();
  m["resolved"] = resolved_json(r.config);
  m["tolerances"] = tolerances_json(r.config);
  json inv = json::object();
  if (r.ode) inv["ode"] = invariants_json(*r.ode);
  if (r.analytic) inv["analytic"] = invariants_json(*r.analytic);
  m["invariants"] = inv;
  m["invariants_pass"] = r.invariants_ok();
  if (r.bloch_deviation) {
    m["path_deviation"] = {{"bloch", report_json(*r.bloch_deviation)},
                           {"entropy", report_json(*r.entropy_deviation)}};
    if (!r.bloch_deviation->ok()) warnings.push_back("analytic and ODE paths disagree beyond tolerance");
  }
  if (!r.invariants_ok()) warnings.push_back("trajectory invariants violated; see manifest");
  m["warnings"] = warnings;

  out.write(csv, trajectory_csv(r));
  out.write(manifest_name(stem), m.dump(2) + "\n");
  return out.commit(warnings, r.invariants_ok());
}

FileSet run_config(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides) {
  ScenarioConfig cfg = ScenarioConfig::from_file(config_path);
  overrides.apply(cfg);
  return write_scenario(simulate(cfg), out_dir, cfg.name);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Rates for T = 0 and T = 1 at two detunings.
FileSet figure1(OutputSet& out, const Overrides& ov) {
  const double t_max = 20.0, step = 0.002;
  const auto grid = uniform_grid(t_max, step);
  std::vector<std::string> warnings;
  for (double det : {0.1, 10.0}) {
    const auto t0 = Clock::now();
    std::array<ScenarioConfig, 2> cfgs{figure_config(0.4, det, 0.0), figure_config(0.4, det, 1.0)};
    std::array<std::vector<RateSample>, 2> series;
    for (std::size_t k = 0; k < 2; ++k) {
      cfgs[k].name = "fig1";
      cfgs[k].run.t_max = t_max;
      cfgs[k].run.output_step = step;
      ov.apply(cfgs[k]);
      const OpenSystem sys = cfgs[k].resolve();
      series[k].resize(grid.size());
      parallel_for(grid.size(), [&](std::size_t i) { series[k][i] = decay_rates(grid[i], sys); });
    }
    const double elapsed = seconds_since(t0);
    struct Column {
      const char* name;
      double RateSample::*field;
    };
    for (Column col : {Column{"gamma_z", &RateSample::gamma_z}, Column{"gamma_plus", &RateSample::gamma_plus},
                       Column{"gamma_minus", &RateSample::gamma_minus}}) {
      const std::string stem = std::string("fig1_") + col.name + "_detuning_" + label(det);
      std::string body = std::string("lambda_t,") + col.name + "_T0," + col.name + "_T1\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        body += format_number(grid[i]) + ',' + format_number(series[0][i].*col.field) + ',' +
                format_number(series[1][i].*col.field) + '\n';
      }
      json m = manifest_header("fig1", stem + ".csv");
      m["wall_time_s"] = elapsed;
      m["series"] = col.name;
      m["grid"] = {{"t_max", t_max}, {"step", step}};
      m["temperature_unit"] = "omega_s";
      m["T0"] = {{"config", cfgs[0].to_json()}, {"resolved", resolved_json(cfgs[0])}};
      m["T1"] = {{"config", cfgs[1].to_json()}, {"resolved", resolved_json(cfgs[1])}};
      if (std::holds_alternative<ResonantApprox>(cfgs[0].bath.strategy)) {
        json lim;
        for (std::size_t k = 0; k < 2; ++k) {
          const auto ml = markovian_limits(cfgs[k].resolve());
          const double v = col.field == &RateSample::gamma_z      ? ml.gamma_z
                           : col.field == &RateSample::gamma_plus ? ml.gamma_plus
                                                                  : ml.gamma_minus;
          lim[k == 0 ? "T0" : "T1"] = v;
        }
        m["markovian_limit"] = lim;
      }
      m["invariants"] = json::object();
      m["warnings"] = cfgs[0].warnings();
      out.write(stem + ".csv", body);
      out.write(manifest_name(stem), m.dump(2) + "\n");
    }
    for (auto& w : cfgs[0].warnings()) warnings.push_back(w);
  }
  return {{}, warnings, true};
}

struct Pending {
  std::string stem;
  ScenarioConfig config;
};

FileSet run_batch(OutputSet& out, std::vector<Pending> jobs, const Overrides& ov) {
  for (auto& j : jobs) ov.apply(j.config);
  std::vector<ScenarioResult> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { results[i] = simulate(jobs[i].config); });
  FileSet acc;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const FileSet f = write_scenario(results[i], out.dir(), jobs[i].stem);
    out.add(f);
    acc.invariants_ok = acc.invariants_ok && f.invariants_ok;
    acc.warnings.insert(acc.warnings.end(), f.warnings.begin(), f.warnings.end());
  }
  return acc;
}

ScenarioConfig figure_run(const std::string& name, double ratio, double det, double temperature,
                          double theta, double t_max) {
  ScenarioConfig c = figure_config(ratio, det, temperature);
  c.name = name;
  c.run.theta = theta;
  c.run.t_max = t_max;
  c.run.path = PathChoice::Both;
  return c;
}

std::string theta_label(double theta) {
  if (theta == 0.0) return "0";
  if (theta == kPi) return "pi";
  if (theta == kPi / 2.0) return "pi_2";
  return label(theta);
}

// E(t, theta) on 128 x 401 points, long format.
void entropy_surface(OutputSet& out, const std::string& scenario, const ScenarioConfig& cfg) {
  const auto t0 = Clock::now();
  const std::size_t n_theta = 128;
  const double t_max = 20.0, step = 0.05;
  const auto grid = uniform_grid(t_max, step);
  const OpenSystem sys = cfg.resolve();
  const EvolveConfig ec = cfg.evolve_config();
  const KernelSource src = KernelSource::make(sys, ec.rate_source, t_max + 1e-9);
  const auto di = DampingIntegrals::build(grid, src);

  std::vector<std::vector<double>> surface(n_theta);
  std::vector<double> thetas(n_theta);
  for (std::size_t k = 0; k < n_theta; ++k) thetas[k] = kPi * static_cast<double>(k) / (n_theta - 1);
  thetas.back() = kPi;
  double max_length = 0.0;
  for (std::size_t k = 0; k < n_theta; ++k) {
    const auto vecs = bloch_vectors({thetas[k], 0.0}, di, sys.dressed.omega_s);
    surface[k].reserve(vecs.size());
    for (const auto& v : vecs) {
      max_length = std::max(max_length, norm(v));
      surface[k].push_back(entropy(v));
    }
  }
  const std::string stem = scenario + "_entropy_surface";
  std::string body = "theta,lambda_t,entropy\n";
  for (std::size_t k = 0; k < n_theta; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      body += format_number(thetas[k]) + ',' + format_number(grid[i]) + ',' + format_number(surface[k][i]) + '\n';
    }
  }
  json m = manifest_header(scenario, stem + ".csv");
  m["wall_time_s"] = seconds_since(t0);
  m["config"] = cfg.to_json();
  m["resolved"] = resolved_json(cfg);
  m["grid"] = {{"n_theta", n_theta}, {"phi", 0.0}, {"t_max", t_max}, {"step", step}, {"path", "analytic"}};
  const bool ok = max_length <= 1.0 + 1e-9;
  m["invariants"] = {{"bloch_length", {{"max", max_length}, {"limit", 1.0 + 1e-9}, {"pass", ok}}}};
  m["invariants_pass"] = ok;
  m["warnings"] = cfg.warnings();
  out.write(stem + ".csv", body);
  out.write(manifest_name(stem), m.dump(2) + "\n");
}

PointerStateResult pointer_for(const ScenarioConfig& cfg, double t_max) {
  const OpenSystem sys = cfg.resolve();
  const EvolveConfig ec = cfg.evolve_config();
  return pointer_angle(KernelSource::make(sys, ec.rate_source, t_max + 1e-9), t_max);
}

void pointer_table(OutputSet& out, const std::string& scenario, const ScenarioConfig& cfg) {
  const auto t0 = Clock::now();
  const double t_max = 20.0;
  const auto p = pointer_for(cfg, t_max);
  const std::string stem = scenario + "_pointer";
  std::string body = "theta,mean_entropy\n";
  for (std::size_t k = 0; k < p.thetas.size(); ++k) {
    body += format_number(p.thetas[k]) + ',' + format_number(p.mean_entropy[k]) + '\n';
  }
  json m = manifest_header(scenario, stem + ".csv");
  m["wall_time_s"] = seconds_since(t0);
  m["config"] = cfg.to_json();
  m["resolved"] = resolved_json(cfg);
  m["grid"] = {{"n_theta", p.thetas.size()}, {"t_max", t_max}, {"time_step", 0.01}};
  m["theta_p"] = p.theta_p;
  m["theta_p_index"] = p.index;
  m["invariants"] = json::object();
  m["warnings"] = cfg.warnings();
  out.write(stem + ".csv", body);
  out.write(manifest_name(stem), m.dump(2) + "\n");
}

FileSet figure2(OutputSet& out, const Overrides& ov) {
  std::vector<Pending> jobs;
  for (double det : {10.0, 0.1}) {
    jobs.push_back({"fig2_detuning_" + label(det), figure_run("fig2", 0.4, det, 1.0, kPi, 10.0)});
  }
  return run_batch(out, std::move(jobs), ov);
}

FileSet figure3(OutputSet& out, const Overrides& ov) {
  std::vector<Pending> jobs;
  for (double ratio : {0.1, 0.4, 0.7, 0.9}) {
    jobs.push_back({"fig3_ratio_" + label(ratio), figure_run("fig3", ratio, 0.1, 1.0, kPi, 10.0)});
  }
  return run_batch(out, std::move(jobs), ov);
}

FileSet figure4(OutputSet& out, const Overrides& ov) {
  ScenarioConfig base = figure_config(0.9, 0.1, 0.0);
  base.name = "fig4";
  ov.apply(base);
  entropy_surface(out, "fig4", base);
  pointer_table(out, "fig4", base);
  std::vector<Pending> jobs;
  for (double theta : {0.0, kPi / 2.0, kPi}) {
    jobs.push_back({"fig4_slice_theta_" + theta_label(theta), figure_run("fig4", 0.9, 0.1, 0.0, theta, 20.0)});
  }
  FileSet f = run_batch(out, std::move(jobs), ov);
  auto w = base.warnings();
  f.warnings.insert(f.warnings.end(), w.begin(), w.end());
  return f;
}

FileSet figure5(OutputSet& out, const Overrides& ov) {
  ScenarioConfig base = figure_config(0.9, 10.0, 1.0);
  base.name = "fig5";
  ov.apply(base);
  entropy_surface(out, "fig5", base);

  const auto t0 = Clock::now();
  const std::vector<double> detunings{0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<ScenarioConfig> cfgs;
  for (double det : detunings) {
    ScenarioConfig c = figure_config(0.9, det, 1.0);
    c.name = "fig5";
    ov.apply(c);
    cfgs.push_back(c);
  }
  std::vector<PointerStateResult> ptr(detunings.size());
  parallel_for(detunings.size(), [&](std::size_t i) { ptr[i] = pointer_for(cfgs[i], 20.0); });
  const std::string stem = "fig5_pointer_vs_detuning";
  std::string body = "detuning,theta_p,theta_index\n";
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    body += format_number(detunings[i]) + ',' + format_number(ptr[i].theta_p) + ',' + std::to_string(ptr[i].index) +
            '\n';
  }
  json m = manifest_header("fig5", stem + ".csv");
  m["wall_time_s"] = seconds_since(t0);
  m["config"] = base.to_json();
  m["resolved"] = resolved_json(base);
  m["grid"] = {{"n_theta", 128}, {"t_max", 20.0}, {"time_step", 0.01}, {"detunings", detunings}};
  m["invariants"] = json::object();
  m["warnings"] = base.warnings();
  out.write(stem + ".csv", body);
  out.write(manifest_name(stem), m.dump(2) + "\n");
  return {{}, base.warnings(), true};
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "fig5"};
  return names;
}

FileSet run_figure(const std::string& name, const fs::path& out_dir, const Overrides& overrides) {
  FileSet (*fn)(OutputSet&, const Overrides&) = nullptr;
  if (name == "fig1") fn = figure1;
  if (name == "fig2") fn = figure2;
  if (name == "fig3") fn = figure3;
  if (name == "fig4") fn = figure4;
  if (name == "fig5") fn = figure5;
  if (!fn) throw InvalidArgument("unknown figure '" + name + "' (expected fig1 to fig5)");
  OutputSet out(out_dir);
  FileSet partial = fn(out, overrides);
  // Deduplicate warnings while keeping order.
  std::vector<std::string> warnings;
  for (auto& w : partial.warnings) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
  return out.commit(std::move(warnings), partial.invariants_ok);
}

}  // namespace smm
