#include "smm/engine.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/stepper/bulirsch_stoer_dense_out.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "smm/entropy.hpp"
#include "smm/errors.hpp"

namespace smm {

namespace {

using OdeState = std::array<double, 8>;

// Row-major (re, im) packing of the 2x2 matrix.
Matrix2c unpack(const OdeState& x) {
  Matrix2c m;
  m << Complex(x[0], x[1]), Complex(x[2], x[3]), Complex(x[4], x[5]), Complex(x[6], x[7]);
  return m;
}

void pack(const Matrix2c& m, OdeState& x) {
  x = {m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(),
       m(1, 0).real(), m(1, 0).imag(), m(1, 1).real(), m(1, 1).imag()};
}

// Transition of the Lindblad operator C: C rho C^dag - {C^dag C, rho}/2.
Matrix2c dissipator(const Matrix2c& c, const Matrix2c& rho) {
  const Matrix2c cdc = c.adjoint() * c;
  return c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
}

// X rho Y - rho Y X
Matrix2c cross(const Matrix2c& x, const Matrix2c& rho, const Matrix2c& y) {
  return x * rho * y - rho * y * x;
}

KernelSample lerp(const KernelSample& a, const KernelSample& b, double w) {
  KernelSample out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.channels[i].gamma = (1.0 - w) * a.channels[i].gamma + w * b.channels[i].gamma;
    out.channels[i].gamma_prime =
        (1.0 - w) * a.channels[i].gamma_prime + w * b.channels[i].gamma_prime;
  }
  return out;
}

}  // namespace

void EvolveConfig::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be positive");
  if (!(output_step > 0.0)) throw InvalidArgument("output step must be positive");
  if (!(step.abs_tol > 0.0) || !(step.rel_tol > 0.0)) {
    throw InvalidArgument("ODE tolerances must be positive");
  }
  if (!(step.initial_step > 0.0) || !(step.min_step > 0.0) || !(step.max_step > 0.0)) {
    throw InvalidArgument("step sizes must be positive");
  }
  if (const auto* g = std::get_if<PrecomputedGrid>(&rate_source); g && !(g->spacing > 0.0)) {
    throw InvalidArgument("rate grid spacing must be positive");
  }
}

KernelSource KernelSource::on_the_fly(const OpenSystem& sys) {
  sys.bath.validate();
  return KernelSource(sys, nullptr);
}

KernelSource KernelSource::tabulated(const OpenSystem& sys, double t_end, double spacing) {
  sys.bath.validate();
  if (!(spacing > 0.0) || !(t_end > 0.0)) throw InvalidArgument("invalid rate grid");
  auto table = std::make_shared<Table>();
  table->spacing = spacing;
  const auto n = static_cast<std::size_t>(std::ceil(t_end / spacing - 1e-9)) + 1;
  table->t.resize(n);
  table->samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) table->t[i] = spacing * static_cast<double>(i);
  // Each node is independent.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      table->samples[i] = kernel_sample(table->t[i], sys);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return KernelSource(sys, std::move(table));
}

KernelSource KernelSource::make(const OpenSystem& sys, const RateSource& src, double t_end) {
  if (const auto* g = std::get_if<PrecomputedGrid>(&src)) return tabulated(sys, t_end, g->spacing);
  return on_the_fly(sys);
}

KernelSample KernelSource::at(double t) const {
  if (!table_) return kernel_sample(t, sys_);
  const auto& tab = *table_;
  if (t < 0.0 || t > tab.t.back() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time " << t << " outside the tabulated kernel range [0, " << tab.t.back() << "]";
    throw InvalidArgument(os.str());
  }
  const double pos = t / tab.spacing;
  auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= tab.t.size()) i = tab.t.size() - 2;
  KernelSample s = lerp(tab.samples[i], tab.samples[i + 1], pos - static_cast<double>(i));
  s.t = t;
  return s;
}

RateSample KernelSource::rates(double t) const { return rates_from_kernels(at(t), sys_.dressed); }

std::span<const double> KernelSource::nodes() const {
  if (!table_) return {};
  return table_->t;
}

double KernelSource::max_frequency() const {
  double f = sys_.dressed.omega_s;
  for (Channel c : kChannels) f = std::max(f, std::abs(sys_.channel_detuning(charge(c))));
  return f;
}

Matrix2c lindblad(const Matrix2c& rho, const RateSample& r) {
  return r.gamma_z * dissipator(chiral::z(), rho) + r.gamma_plus * dissipator(chiral::raise(), rho) +
         r.gamma_minus * dissipator(chiral::lower(), rho);
}

std::array<Matrix2c, 6> nl_groups(const Matrix2c& rho, const KernelSample& k,
                                  const DressedParams& d) {
  const Matrix2c cz = chiral::z();
  const Matrix2c cp = chiral::raise();
  const Matrix2c cm = chiral::lower();
  const double d0p = d.delta_zero * d.delta_plus;
  const double d0m = d.delta_zero * d.delta_minus;
  const double dpm = d.delta_plus * d.delta_minus;
  std::array<Matrix2c, 6> g;
  g[0] = k[Channel::Zero].gamma * (d0p * cross(cz, rho, cm) - d0m * cross(cz, rho, cp));
  g[1] = k[Channel::Plus].gamma * (d0p * cross(cp, rho, cz) - dpm * cross(cp, rho, cp));
  g[2] = -k[Channel::Minus].gamma * (d0m * cross(cm, rho, cz) + dpm * cross(cm, rho, cm));
  g[3] = k[Channel::Zero].gamma_prime * (d0p * cross(cm, rho, cz) - d0m * cross(cp, rho, cz));
  g[4] = k[Channel::Plus].gamma_prime * (d0p * cross(cz, rho, cp) - dpm * cross(cp, rho, cp));
  g[5] = -k[Channel::Minus].gamma_prime * (d0m * cross(cz, rho, cm) + dpm * cross(cm, rho, cm));
  return g;
}

Matrix2c nl_superoperator(const Matrix2c& rho, const KernelSample& k, const DressedParams& d) {
  Matrix2c sum = Matrix2c::Zero();
  for (const auto& g : nl_groups(rho, k, d)) sum += g;
  return sum + sum.adjoint();
}

Matrix2c lamb_shift_hamiltonian(const KernelSample& k, const DressedParams& d) {
  const Matrix2c cz = chiral::z();
  const Matrix2c cp = chiral::raise();
  const Matrix2c cm = chiral::lower();
  auto im = [&](Channel c) { return (k[c].gamma - k[c].gamma_prime).imag(); };
  // C_q^dag C_q for q = +, - with C_+ = raise, C_- = lower.
  return im(Channel::Zero) * d.delta_zero * d.delta_zero * (cz * cz) +
         im(Channel::Plus) * d.delta_plus * d.delta_plus * (cm * cp) +
         im(Channel::Minus) * d.delta_minus * d.delta_minus * (cp * cm);
}

Matrix2c rhs(const Matrix2c& rho, const KernelSample& k, const DressedParams& d, bool include_nl,
             bool include_lamb_shift) {
  Matrix2c h = 0.5 * d.omega_s * chiral::z();
  if (include_lamb_shift) h += lamb_shift_hamiltonian(k, d);
  const Complex minus_i(0.0, -1.0);
  Matrix2c out = minus_i * (h * rho - rho * h) + lindblad(rho, rates_from_kernels(k, d));
  if (include_nl) out += nl_superoperator(rho, k, d);
  return out;
}

Matrix2c rhs(double t, const Matrix2c& rho, const KernelSource& src, const EvolveConfig& cfg) {
  return rhs(rho, src.at(t), src.system().dressed, cfg.include_nl, cfg.include_lamb_shift);
}

std::string to_string(EvolutionPath p) { return p == EvolutionPath::ODE ? "ode" : "analytic"; }

void InvariantReport::observe(const Matrix2c& raw, const QubitState& cleaned) {
  max_trace_error = std::max(max_trace_error, std::abs(raw.trace() - 1.0));
  max_hermiticity_error = std::max(max_hermiticity_error, hermiticity_error(raw));
  max_hermitization_correction =
      std::max(max_hermitization_correction, (raw - cleaned.matrix()).cwiseAbs().maxCoeff());
  min_eigenvalue = std::min(min_eigenvalue, cleaned.eigenvalues()[0]);
  max_purity = std::max(max_purity, cleaned.purity());
}

std::vector<double> uniform_grid(double t_max, double step) {
  if (!(t_max > 0.0) || !(step > 0.0)) throw InvalidArgument("invalid output grid");
  const auto n = static_cast<std::size_t>(std::llround(std::ceil(t_max / step - 1e-9)));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = std::min(t_max, step * static_cast<double>(i));
  return g;
}

Trajectory evolve(const QubitState& rho0, std::span<const double> grid, const EvolveConfig& cfg,
                  const KernelSource& src) {
  namespace odeint = boost::numeric::odeint;
  cfg.validate();
  if (grid.empty() || grid.front() != 0.0) throw InvalidArgument("output grid must start at t = 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("output grid must be strictly increasing");
  }
  // Re-validate: the caller may hand in an unchecked state.
  const QubitState start = QubitState::from_matrix(rho0.matrix());

  Trajectory traj;
  traj.path = EvolutionPath::ODE;
  traj.system = src.system();
  traj.config = cfg;
  traj.samples.reserve(grid.size());

  auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
    pack(rhs(t, unpack(x), src, cfg), dxdt);
  };

  auto emit = [&](double t, const Matrix2c& raw) {
    const QubitState clean = QubitState::unchecked(0.5 * (raw + raw.adjoint()));
    traj.invariants.observe(raw, clean);
    TrajectorySample s;
    s.t = t;
    s.state = clean;
    s.rates = src.rates(t);
    s.entropy = entropy(clean);
    traj.samples.push_back(s);
  };

  const double last = grid.back();
  if (src.is_tabulated() && src.nodes().back() < last + cfg.step.max_step) {
    throw InvalidArgument("tabulated kernels must extend one maximal step beyond the last output time");
  }
  auto check = [&](double t, const OdeState& x) {
    const Matrix2c m = unpack(x);
    const double drift = std::abs(m.trace() - 1.0);
    if (!(drift <= 1e-7)) {
      std::ostringstream os;
      os << "trace drift " << drift << " at t = " << t << " exceeds 1e-7";
      throw IntegrationError(os.str(), t);
    }
    const double ev = QubitState::unchecked(0.5 * (m + m.adjoint())).eigenvalues()[0];
    if (ev < -1e-6) {
      std::ostringstream os;
      os << "eigenvalue " << ev << " at t = " << t
         << " below -1e-6: parameters leave the weak-coupling regime";
      throw IntegrationError(os.str(), t);
    }
  };

  OdeState x;
  pack(start.matrix(), x);
  emit(0.0, start.matrix());
  if (grid.size() == 1) return traj;

  // The configured tolerances target the whole trajectory; each step gets a
  // share set by the number of fast periods it has to resolve.
  const double periods = 1.0 + src.max_frequency() * last / (2.0 * std::numbers::pi);
  odeint::bulirsch_stoer_dense_out<OdeState> stepper(cfg.step.abs_tol / periods, cfg.step.rel_tol / periods,
                                                     1.0, 1.0, cfg.step.max_step);
  stepper.initialize(x, 0.0, std::min(cfg.step.initial_step, last));
  std::size_t next = 1;
  OdeState y;
  try {
    while (next < grid.size()) {
      const auto [t0, t1] = stepper.do_step(system);
      ++traj.steps;
      check(t1, stepper.current_state());
      if (t1 - t0 < cfg.step.min_step && t1 < last) {
        std::ostringstream os;
        os << "step size " << (t1 - t0) << " underflow at t = " << t1 << " after " << traj.steps
           << " steps";
        throw IntegrationError(os.str(), t1);
      }
      while (next < grid.size() && grid[next] <= t1) {
        stepper.calc_state(grid[next], y);
        emit(grid[next], unpack(y));
        ++next;
      }
    }
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("step adjustment failed: ") + e.what(),
                           stepper.current_time());
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("no progress: ") + e.what(), stepper.current_time());
  }
  return traj;
}

Trajectory evolve(const QubitState& rho0, const EvolveConfig& cfg, const OpenSystem& sys) {
  cfg.validate();
  const auto grid = uniform_grid(cfg.t_max, cfg.output_step);
  const double t_end = cfg.t_max + cfg.step.max_step + 1e-9;
  return evolve(rho0, grid, cfg, KernelSource::make(sys, cfg.rate_source, t_end));
}

}  // namespace smm
