#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "smm/errors.hpp"
#include "smm/scenarios.hpp"
#include "smm/verify.hpp"

namespace {

struct Flags {
  double tolerance = 0.0;
  std::string strategy;
  std::string path;
  bool include_nl = false;
  bool include_lamb = false;

  smm::Overrides overrides() const {
    smm::Overrides o;
    if (tolerance > 0.0) o.tolerance = tolerance;
    if (!strategy.empty()) o.strategy = smm::parse_strategy(strategy);
    if (!path.empty()) o.path = smm::parse_path(path);
    o.include_nl = include_nl;
    o.include_lamb = include_lamb;
    return o;
  }
};

void add_run_flags(CLI::App* app, Flags& f) {
  app->add_option("--tolerance", f.tolerance, "ODE absolute and relative tolerance")->check(CLI::PositiveNumber);
  app->add_option("--strategy", f.strategy, "occupation strategy")->check(CLI::IsMember({"resonant", "quadrature"}));
  app->add_option("--path", f.path, "evolution path")->check(CLI::IsMember({"ode", "analytic", "both"}));
  app->add_flag("--include-nl", f.include_nl, "add the non-Lindblad term");
  app->add_flag("--include-lamb", f.include_lamb, "add the Lamb-shift Hamiltonian");
}

int report(const smm::FileSet& files) {
  for (const auto& f : files.files) std::cout << f.string() << '\n';
  for (const auto& w : files.warnings) std::cerr << "warning: " << w << '\n';
  if (!files.invariants_ok) {
    std::cerr << "error: invariant check failed; see the manifests\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovian decoherence of a molecular-magnet chiral qubit"};
  app.set_version_flag("--version", std::string(smm::kToolVersion));
  app.require_subcommand(1);

  Flags fig_flags, run_flags;
  std::string fig_name, fig_out = ".";
  auto* fig = app.add_subcommand("fig", "reproduce a figure data set");
  fig->add_option("name", fig_name, "figure")->required()->check(CLI::IsMember(smm::figure_names()));
  fig->add_option("--out", fig_out, "output directory");
  add_run_flags(fig, fig_flags);

  std::string config_path, run_out = ".";
  auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "output directory");
  add_run_flags(run, run_flags);

  std::string suite = "all";
  auto* ver = app.add_subcommand("verify", "run the oracle suites");
  ver->add_option("--suite", suite, "suite")->check(CLI::IsMember({"kernels", "jc", "paths", "all"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fig) return report(smm::run_figure(fig_name, fig_out, fig_flags.overrides()));
    if (*run) return report(smm::run_config(config_path, run_out, run_flags.overrides()));
    if (*ver) {
      bool ok = true;
      for (const auto& r : smm::verify::run_suite(suite)) {
        std::cout << smm::verify::format(r) << '\n';
        ok = ok && r.ok();
      }
      return ok ? 0 : 1;
    }
  } catch (const smm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
