#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "smm/engine.hpp"
#include "smm/solution.hpp"
#include "smm/verify.hpp"

namespace smm {

inline constexpr const char* kToolName = "smmdecoh";
inline constexpr const char* kToolVersion = "0.1.0";

enum class PathChoice { ODE, Analytic, Both };
std::string to_string(PathChoice p);
PathChoice parse_path(const std::string& s);

OccupationStrategy parse_strategy(const std::string& s);

// All inputs are dimensionless groups scaled by lambda.
struct ScenarioConfig {
  std::string name = "run";  // output file stem

  struct System {
    // Either omega_so (with d_eps) or delta_ratio (with omega_s).
    std::optional<double> omega_so;
    std::optional<double> d_eps;
    std::optional<double> delta_ratio;  // Delta_so / omega_s
    std::optional<double> omega_s;
    double drive = 500.0;
  } system;

  struct Bath {
    double u2 = 0.1;
    double detuning = 0.1;  // (omega_0 - omega) / lambda
    double temperature = 0.0;
    std::string temperature_unit = "omega_s";  // or "lambda"
    OccupationStrategy strategy = ResonantApprox{};

    double temperature_in_lambda(double omega_s) const;
  } bath;

  struct Run {
    double t_max = 10.0;
    double output_step = 0.01;
    double theta = 0.0;
    double phi = 0.0;
    bool include_nl = false;
    bool include_lamb = false;
    PathChoice path = PathChoice::ODE;
    bool rates = true;
    bool entropy = true;
    double tolerance = 1e-12;  // ODE abs and rel tolerance
    // Rate-grid spacing; unset means on-the-fly kernels (resonant) or
    // 1e-2 (quadrature).
    std::optional<double> rate_grid_spacing;
  } run;

  // Throws ConfigError naming the offending key.
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void validate() const;
  SystemParams system_params() const;
  OpenSystem resolve() const;
  EvolveConfig evolve_config() const;
  InitialAngles angles() const { return {run.theta, run.phi}; }
  std::vector<std::string> warnings() const;
};

// Command-line overrides applied on top of a config or figure scenario.
struct Overrides {
  std::optional<double> tolerance;
  std::optional<OccupationStrategy> strategy;
  bool include_nl = false;
  bool include_lamb = false;
  std::optional<PathChoice> path;

  void apply(ScenarioConfig& cfg) const;
};

// Figure defaults: omega_s = 100, drive 500, u^2 = 0.1, T in omega_s units.
ScenarioConfig figure_config(double delta_ratio, double detuning, double temperature);

struct ScenarioResult {
  ScenarioConfig config;
  std::optional<Trajectory> ode;
  std::optional<Trajectory> analytic;
  // Set when both paths ran.
  std::optional<verify::OracleReport> bloch_deviation;
  std::optional<verify::OracleReport> entropy_deviation;
  double wall_seconds = 0.0;

  bool invariants_ok() const;
};

ScenarioResult simulate(const ScenarioConfig& cfg);

// Trajectory CSV: lambda_t,R_x,R_y,R_z[,gamma_z,gamma_plus,gamma_minus][,entropy].
// With both paths the state and entropy columns carry _ode/_analytic suffixes.
std::string trajectory_csv(const ScenarioResult& r);
std::string format_number(double v);

struct FileSet {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  bool invariants_ok = true;
};

// Writes <stem>.csv and <stem>.manifest.json into out_dir.
FileSet write_scenario(const ScenarioResult& r, const std::filesystem::path& out_dir,
                       const std::string& stem);

FileSet run_config(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                   const Overrides& overrides = {});

// name in {fig1, ..., fig5}. Files already written are removed on failure.
FileSet run_figure(const std::string& name, const std::filesystem::path& out_dir,
                   const Overrides& overrides = {});

const std::vector<std::string>& figure_names();

}  // namespace smm
