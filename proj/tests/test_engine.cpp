#include <random>

#include "doctest.h"
#include "smm/engine.hpp"
#include "smm/errors.hpp"
#include "smm/quadrature.hpp"
#include "smm/solution.hpp"
#include "support.hpp"

using namespace smm;
using smm::testing::figure_system;
using smm::testing::kPi;
using smm::testing::max_abs;

namespace {

KernelSample random_kernels(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  KernelSample k;
  for (auto& c : k.channels) {
    c.gamma = {n(rng), n(rng)};
    c.gamma_prime = {n(rng), n(rng)};
  }
  return k;
}

double max_bloch_gap(const Trajectory& a, const Trajectory& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto x = a.samples[i].state.bloch(), y = b.samples[i].state.bloch();
    for (int k = 0; k < 3; ++k) m = std::max(m, std::abs(x[k] - y[k]));
  }
  return m;
}

}  // namespace

TEST_CASE("closed system generator is pure precession") {
  std::mt19937_64 rng(3);
  const auto d = figure_system(0.4, 0.1, 0.0).dressed;
  for (int i = 0; i < 20; ++i) {
    const Matrix2c rho = smm::testing::random_density(rng);
    const Matrix2c expected = Complex(0.0, -0.5 * d.omega_s) * (chiral::z() * rho - rho * chiral::z());
    CHECK(max_abs(rhs(rho, KernelSample{}, d, true, true) - expected) < 1e-12);
  }
}

TEST_CASE("balanced gain and loss leave R_z stationary at the mixed state") {
  const Matrix2c rho = 0.5 * chiral::identity();
  RateSample r{0.0, 0.37, 0.21, 0.21};
  const Matrix2c out = lindblad(rho, r);
  // d rho_00/dt = gamma_+ rho_11 - gamma_- rho_00 = 0 by hand.
  CHECK(std::abs(out(0, 0) - out(1, 1)) < 1e-16);
  CHECK(max_abs(out) < 1e-16);
  r.gamma_plus = 0.5;
  CHECK(lindblad(rho, r)(0, 0).real() == doctest::Approx(0.5 * (0.5 - 0.21)).epsilon(1e-15));
}

TEST_CASE("Lindblad-only generator is trace free") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto d = figure_system(0.4, 0.1, 0.0).dressed;
  for (int i = 0; i < 100; ++i) {
    const Matrix2c rho = smm::testing::random_density(rng);
    CHECK(std::abs(lindblad(rho, RateSample{0.0, n(rng), n(rng), n(rng)}).trace()) < 1e-15);
    CHECK(std::abs(rhs(rho, random_kernels(rng), d, false, true).trace()) < 1e-14);
  }
}

TEST_CASE("non-Lindblad term") {
  std::mt19937_64 rng(9);
  SUBCASE("vanishes without mixing") {
    const auto d = dressed_params(SystemParams{560.0, 500.0, 0.0});
    for (int i = 0; i < 20; ++i) {
      CHECK(max_abs(nl_superoperator(smm::testing::random_density(rng), random_kernels(rng), d)) == 0.0);
    }
  }
  SUBCASE("real equal kernels give a Hermitian output") {
    const auto d = figure_system(0.4, 0.1, 0.0).dressed;
    KernelSample k;
    for (auto& c : k.channels) c.gamma = c.gamma_prime = 0.37;
    for (int i = 0; i < 20; ++i) {
      const Matrix2c out = nl_superoperator(smm::testing::random_density(rng), k, d);
      CHECK(hermiticity_error(out) < 1e-15);
    }
  }
  SUBCASE("trace free for random states and kernels") {
    const auto d = figure_system(0.7, 0.1, 0.0).dressed;
    for (int i = 0; i < 100; ++i) {
      const Matrix2c out = nl_superoperator(smm::testing::random_density(rng), random_kernels(rng), d);
      CHECK(std::abs(out.trace()) < 1e-14);
    }
  }
  SUBCASE("groups add up") {
    const auto d = figure_system(0.4, 0.1, 0.0).dressed;
    const Matrix2c rho = smm::testing::random_density(rng);
    const auto k = random_kernels(rng);
    Matrix2c sum = Matrix2c::Zero();
    for (const auto& g : nl_groups(rho, k, d)) sum += g;
    CHECK(max_abs(nl_superoperator(rho, k, d) - (sum + sum.adjoint())) < 1e-15);
  }
}

TEST_CASE("Lamb shift Hamiltonian is Hermitian and diagonal") {
  std::mt19937_64 rng(13);
  const auto d = figure_system(0.4, 0.1, 0.0).dressed;
  const Matrix2c h = lamb_shift_hamiltonian(random_kernels(rng), d);
  CHECK(hermiticity_error(h) == 0.0);
  CHECK(std::abs(h(0, 1)) == 0.0);
}

TEST_CASE("excited dressed state is stationary without a bath") {
  OpenSystem sys = figure_system(0.4, 0.1, 0.0, 0.0);
  EvolveConfig cfg;
  cfg.t_max = 5.0;
  const auto traj = evolve(QubitState::from_angles(0.0, 0.0), cfg, sys);
  for (const auto& s : traj.samples) CHECK(s.state.bloch()[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("trajectory metadata") {
  const auto sys = figure_system(0.4, 0.1, 1.0);
  EvolveConfig cfg;
  cfg.t_max = 1.0;
  const auto rho0 = QubitState::from_angles(1.0, 0.5);
  const auto traj = evolve(rho0, cfg, sys);
  CHECK(traj.path == EvolutionPath::ODE);
  CHECK(traj.samples.front().t == 0.0);
  CHECK(max_abs(traj.samples.front().state.matrix() - rho0.matrix()) == 0.0);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  CHECK(traj.samples.back().t == 1.0);
  CHECK(to_string(traj.path) == "ode");
}

TEST_CASE("Lindblad-only ODE matches the closed-form Bloch vector for Fig. 2") {
  for (double det : {10.0, 0.1}) {
    const auto sys = figure_system(0.4, det, 1.0);
    EvolveConfig cfg;
    cfg.t_max = 10.0;
    const auto grid = uniform_grid(cfg.t_max, cfg.output_step);
    const auto src = KernelSource::on_the_fly(sys);
    const auto ode = evolve(QubitState::from_angles(kPi / 3, 0.7), grid, cfg, src);
    const auto an = bloch_analytic({kPi / 3, 0.7}, grid, src);
    CHECK(max_bloch_gap(ode, an) <= 1e-6);
    CHECK(ode.invariants.all_ok());
  }
}

TEST_CASE("pure amplitude damping toward the ground state") {
  // delta_0 = 0, delta_+ = 1, T = 0: R_z = (1 + R_z(0)) exp(-p) - 1 with p = int gamma_-.
  OpenSystem sys;
  sys.omega = 10.0;
  sys.dressed = dressed_params(SystemParams{15.0, 10.0, 0.0});
  sys.bath = BathSpec{0.05, 1.0, 15.3, 0.0, ResonantApprox{}};
  EvolveConfig cfg;
  cfg.t_max = 8.0;
  cfg.output_step = 0.5;
  const double rz0 = std::cos(0.9);
  const auto traj = evolve(QubitState::from_angles(0.9, 0.0), cfg, sys);
  for (const auto& s : traj.samples) {
    if (s.t == 0.0) continue;
    const auto p = quad::integrate<double>([&](double t) { return decay_rates(t, sys).gamma_minus; }, 0.0, s.t,
                                           {1e-15, 1e-13});
    CHECK(s.state.bloch()[2] == doctest::Approx((1.0 + rz0) * std::exp(-p.value) - 1.0).epsilon(1e-9));
  }
}

TEST_CASE("invariants along trajectories with every term switched on") {
  for (double det : {0.1, 10.0}) {
    const auto sys = figure_system(0.7, det, 1.0);
    EvolveConfig cfg;
    cfg.t_max = 10.0;
    cfg.include_nl = true;
    cfg.include_lamb_shift = true;
    const auto traj = evolve(QubitState::from_angles(1.2, 0.3), cfg, sys);
    CHECK(traj.invariants.trace_ok());
    CHECK(traj.invariants.hermiticity_ok());
    CHECK(traj.invariants.purity_ok());
    CHECK(traj.invariants.positivity_ok());
    for (const auto& s : traj.samples) CHECK(norm(s.state.bloch()) <= 1.0 + 1e-9);
  }
}

TEST_CASE("dense output is consistent with the generator to second order") {
  const auto sys = figure_system(0.4, 0.1, 1.0);
  EvolveConfig cfg;
  cfg.step.abs_tol = cfg.step.rel_tol = 1e-13;
  cfg.include_nl = true;
  const double t0 = 2.0;
  const auto src = KernelSource::on_the_fly(sys);
  const std::vector<double> hs{4e-3, 2e-3, 1e-3, 5e-4};
  std::vector<double> errs;
  for (double h : hs) {
    const std::vector<double> grid{0.0, t0 - h, t0, t0 + h};
    cfg.t_max = t0 + h;
    const auto tr = evolve(QubitState::from_angles(1.0, 0.0), grid, cfg, src);
    const Matrix2c fd = (tr.samples[3].state.matrix() - tr.samples[1].state.matrix()) / (2.0 * h);
    errs.push_back(max_abs(fd - rhs(t0, tr.samples[2].state.matrix(), src, cfg)));
  }
  const double slope = std::log(errs.front() / errs.back()) / std::log(hs.front() / hs.back());
  CHECK(slope >= 1.9);
  CHECK(slope <= 2.1);
}

TEST_CASE("halving the tolerance moves the final state within ten tolerances") {
  const auto sys = figure_system(0.4, 0.1, 1.0);
  EvolveConfig a;
  a.t_max = 10.0;
  a.step.abs_tol = a.step.rel_tol = 1e-10;
  EvolveConfig b = a;
  b.step.abs_tol = b.step.rel_tol = 5e-11;
  const auto ra = evolve(QubitState::from_angles(1.0, 0.0), a, sys).samples.back().state.bloch();
  const auto rb = evolve(QubitState::from_angles(1.0, 0.0), b, sys).samples.back().state.bloch();
  for (int k = 0; k < 3; ++k) CHECK(std::abs(ra[k] - rb[k]) <= 10 * 1e-10);
}

TEST_CASE("tabulated rates track on-the-fly rates") {
  const auto sys = figure_system(0.4, 10.0, 1.0);
  EvolveConfig fly;
  fly.t_max = 10.0;
  EvolveConfig grid = fly;
  grid.rate_source = PrecomputedGrid{1e-3};
  const auto a = evolve(QubitState::from_angles(kPi / 2, 0.0), fly, sys);
  const auto b = evolve(QubitState::from_angles(kPi / 2, 0.0), grid, sys);
  CHECK(max_bloch_gap(a, b) <= 1e-6);
}

TEST_CASE("kernel tables refuse to extrapolate") {
  const auto src = KernelSource::tabulated(figure_system(0.4, 0.1, 0.0), 1.0, 0.01);
  CHECK(src.is_tabulated());
  CHECK(src.nodes().size() == 101);
  CHECK_THROWS_AS(src.at(1.5), InvalidArgument);
  EvolveConfig cfg;
  cfg.t_max = 1.0;
  const auto grid = uniform_grid(1.0, 0.01);
  CHECK_THROWS_AS(evolve(QubitState::from_angles(1.0, 0.0), grid, cfg, src), InvalidArgument);
}

TEST_CASE("configuration and grid errors") {
  EvolveConfig cfg;
  cfg.t_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.t_max = 1.0;
  cfg.step.abs_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  const auto src = KernelSource::on_the_fly(figure_system(0.4, 0.1, 0.0));
  const std::vector<double> bad{0.0, 0.5, 0.5};
  CHECK_THROWS_AS(evolve(QubitState::maximally_mixed(), bad, EvolveConfig{}, src), InvalidArgument);
  const std::vector<double> late{0.1, 0.5};
  CHECK_THROWS_AS(evolve(QubitState::maximally_mixed(), late, EvolveConfig{}, src), InvalidArgument);
}

TEST_CASE("strong coupling outside the perturbative regime aborts") {
  // u^2 = 2000 on omega_s = 100: the negative early-time excitation rate
  // pushes the upper population of the ground state below zero.
  const auto sys = figure_system(0.4, 10.0, 0.0, 2000.0);
  EvolveConfig cfg;
  cfg.t_max = 10.0;
  CHECK_THROWS_AS(evolve(QubitState::from_angles(kPi, 0.0), cfg, sys), IntegrationError);
}

TEST_CASE("step underflow aborts") {
  const auto sys = figure_system(0.4, 0.1, 1.0);
  EvolveConfig cfg;
  cfg.t_max = 1.0;
  cfg.step.abs_tol = cfg.step.rel_tol = 1e-30;
  cfg.step.min_step = 1e-3;
  CHECK_THROWS_AS(evolve(QubitState::from_angles(1.0, 0.0), cfg, sys), IntegrationError);
}
