#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smm/bath.hpp"
#include "smm/model.hpp"
#include "smm/state.hpp"

namespace smm {

// abs_tol and rel_tol are accuracy targets for the whole trajectory; the
// per-step tolerances are divided by the number of fast periods in the run.
struct StepControl {
  double initial_step = 1e-4;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double min_step = 1e-12;
  double max_step = 0.05;
};

// Kernels evaluated at every right-hand-side call.
struct OnTheFly {};
// Kernels tabulated on a uniform grid and interpolated linearly.
struct PrecomputedGrid {
  double spacing = 1e-3;
};
using RateSource = std::variant<OnTheFly, PrecomputedGrid>;

struct EvolveConfig {
  double t_max = 10.0;
  double output_step = 0.01;
  StepControl step;
  bool include_nl = false;
  bool include_lamb_shift = false;
  RateSource rate_source = OnTheFly{};

  void validate() const;
};

// Supplies kernel samples (and the rates built from them) to both the ODE
// and the analytic path. Tables are immutable and shared between copies.
class KernelSource {
 public:
  static KernelSource on_the_fly(const OpenSystem& sys);
  static KernelSource tabulated(const OpenSystem& sys, double t_end, double spacing);
  static KernelSource make(const OpenSystem& sys, const RateSource& src, double t_end);

  KernelSample at(double t) const;
  RateSample rates(double t) const;

  const OpenSystem& system() const { return sys_; }
  bool is_tabulated() const { return static_cast<bool>(table_); }
  // Table nodes; empty when evaluating on the fly.
  std::span<const double> nodes() const;
  // Largest phase rate of the kernels, |delta_q| or omega_s.
  double max_frequency() const;

 private:
  struct Table {
    double spacing;
    std::vector<double> t;
    std::vector<KernelSample> samples;
  };
  KernelSource(const OpenSystem& sys, std::shared_ptr<const Table> table)
      : sys_(sys), table_(std::move(table)) {}
  OpenSystem sys_;
  std::shared_ptr<const Table> table_;
};

// L[rho] with the three time-dependent rates.
Matrix2c lindblad(const Matrix2c& rho, const RateSample& rates);

// The six coefficient groups of the non-Lindblad term, before adding the
// Hermitian conjugate. Exposed for auditing; nl_superoperator sums them.
std::array<Matrix2c, 6> nl_groups(const Matrix2c& rho, const KernelSample& k, const DressedParams& d);
Matrix2c nl_superoperator(const Matrix2c& rho, const KernelSample& k, const DressedParams& d);

Matrix2c lamb_shift_hamiltonian(const KernelSample& k, const DressedParams& d);

Matrix2c rhs(const Matrix2c& rho, const KernelSample& k, const DressedParams& d, bool include_nl,
             bool include_lamb_shift);
Matrix2c rhs(double t, const Matrix2c& rho, const KernelSource& src, const EvolveConfig& cfg);

enum class EvolutionPath { ODE, Analytic };
std::string to_string(EvolutionPath p);

struct TrajectorySample {
  double t = 0.0;
  QubitState state = QubitState::maximally_mixed();
  RateSample rates;
  double entropy = 0.0;
};

// Worst-case invariant values seen along a trajectory.
struct InvariantReport {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;  // before re-Hermitization
  double max_hermitization_correction = 0.0;
  double min_eigenvalue = 1.0;
  double max_purity = 0.0;

  static constexpr double kTraceLimit = 1e-9;
  static constexpr double kHermiticityLimit = 1e-10;
  static constexpr double kPurityExcess = 1e-9;
  static constexpr double kEigenvalueFloor = -1e-9;

  bool trace_ok() const { return max_trace_error <= kTraceLimit; }
  bool hermiticity_ok() const { return max_hermiticity_error <= kHermiticityLimit; }
  bool purity_ok() const { return max_purity <= 1.0 + kPurityExcess; }
  bool positivity_ok() const { return min_eigenvalue >= kEigenvalueFloor; }
  bool all_ok() const { return trace_ok() && hermiticity_ok() && purity_ok() && positivity_ok(); }

  void observe(const Matrix2c& raw, const QubitState& cleaned);
};

struct Trajectory {
  EvolutionPath path = EvolutionPath::ODE;
  OpenSystem system;
  EvolveConfig config;
  std::vector<TrajectorySample> samples;
  InvariantReport invariants;
  std::size_t steps = 0;
};

std::vector<double> uniform_grid(double t_max, double step);

// Integrates the master equation from rho0 and samples it on `grid`
// (strictly increasing, starting at 0).
Trajectory evolve(const QubitState& rho0, std::span<const double> grid, const EvolveConfig& cfg,
                  const KernelSource& src);
Trajectory evolve(const QubitState& rho0, const EvolveConfig& cfg, const OpenSystem& sys);

}  // namespace smm
