#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smm/bath.hpp"
#include "smm/engine.hpp"
#include "smm/solution.hpp"

namespace smm::verify {

// Every oracle threshold lives here.
struct Tolerances {
  static constexpr double kernel_rel = 1e-6;
  static constexpr double paths_abs = 1e-6;
  static constexpr double closed_paths_abs = 1e-10;
  static constexpr double entropy_paths_abs = 1e-6;
  static constexpr double jc_abs = 1e-3;
  static constexpr double jc_probability = 1e-9;
};

struct OracleReport {
  std::string oracle;
  std::string parameters;
  double max_abs_deviation = 0.0;
  double max_rel_deviation = 0.0;
  double tolerance = 0.0;
  // Empty for report-only comparisons.
  std::optional<bool> pass;

  bool ok() const { return !pass || *pass; }
};

std::string format(const OracleReport& r);

// Both integrals of the kernel definition done numerically: the frequency
// integral per time node (Fourier quadrature on the half line for the
// resonant approximation, adaptive quadrature otherwise) and the time
// integral by composite Gauss-Legendre. Cost-guarded to t <= 20 / lambda.
KernelPair kernel_bruteforce(double t, Channel q, const OpenSystem& sys);
// All three channels on shared time nodes.
KernelSample kernel_bruteforce_sample(double t, const OpenSystem& sys);

// Excited-state population of a two-level emitter in a Lorentzian vacuum
// (exact solution of the amplitude equation with exponential memory).
double exact_jc_survival(double t, double detuning, double u2, double lambda);

struct JcBudget {
  double population = 0.0;  // |c|^2
  double pseudomode = 0.0;  // |b|^2
  double emitted = 0.0;     // 2 lambda int |b|^2
  double total() const { return population + pseudomode + emitted; }
};
JcBudget exact_jc_budget(double t, double detuning, double u2, double lambda);

// Max Bloch-component deviation between two trajectories on the same grid.
// Pass/fail only when the ODE run is Lindblad-only.
OracleReport compare_trajectories(const Trajectory& ode, const Trajectory& analytic,
                                  double tolerance);
OracleReport compare_entropies(const Trajectory& ode, const Trajectory& analytic, double tolerance);

struct PathComparison {
  Trajectory ode;
  Trajectory analytic;
  OracleReport bloch;
  OracleReport entropy;
};
PathComparison compare_paths(const OpenSystem& sys, const InitialAngles& angles,
                             const EvolveConfig& cfg, double tolerance = Tolerances::paths_abs);

// Named suites: "kernels", "jc", "paths", "all".
std::vector<OracleReport> run_suite(const std::string& name);

}  // namespace smm::verify
