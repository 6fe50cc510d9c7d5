#include "doctest.h"
#include "smm/errors.hpp"
#include "smm/quadrature.hpp"
#include "smm/solution.hpp"
#include "support.hpp"

using namespace smm;
using smm::testing::figure_system;
using smm::testing::kPi;

namespace {

double mean_abs_rz(const Trajectory& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.samples.size(); ++i) {
    acc += 0.5 * (t.samples[i + 1].t - t.samples[i].t) *
           (std::abs(t.samples[i].state.bloch()[2]) + std::abs(t.samples[i + 1].state.bloch()[2]));
  }
  return acc / t.samples.back().t;
}

}  // namespace

TEST_CASE("entropy closed form") {
  CHECK(entropy(1.0) == 0.0);
  CHECK(std::abs(entropy(0.0) - std::log(2.0)) <= 1e-12);
  const double expected = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  CHECK(std::abs(entropy(0.5) - expected) <= 1e-12);
  CHECK(entropy(0.5) == doctest::Approx(0.562335).epsilon(1e-6));
  CHECK(entropy(1.0 + 5e-10) == 0.0);
  CHECK(entropy(1.0 + 5e-7) == 0.0);
  CHECK_THROWS_AS(entropy(1.0 + 2e-6), InvalidState);
  CHECK(entropy(BlochVector{0.3, 0.0, 0.4}) == doctest::Approx(entropy(0.5)).epsilon(1e-15));
  CHECK(entropy(QubitState::from_bloch({0.3, 0.0, 0.4})) == doctest::Approx(entropy(0.5)).epsilon(1e-12));
}

TEST_CASE("entropy decreases with the Bloch length") {
  double prev = entropy(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double e = entropy(i / 1000.0);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("initial angles") {
  CHECK_THROWS_AS(InitialAngles({-0.1, 0.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(InitialAngles({0.5, 7.0}).validate(), InvalidArgument);
  const auto r = InitialAngles{1.0, 2.0}.bloch();
  CHECK(norm(r) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("analytic path starts on the initial Bloch vector") {
  const auto sys = figure_system(0.4, 0.1, 1.0);
  const auto grid = uniform_grid(1.0, 0.1);
  const InitialAngles a{0.8, 1.3};
  const auto tr = bloch_analytic(a, grid, KernelSource::on_the_fly(sys));
  const auto r0 = tr.samples.front().state.bloch(), e = a.bloch();
  for (int k = 0; k < 3; ++k) CHECK(r0[k] == doctest::Approx(e[k]).epsilon(1e-15));
  CHECK(tr.path == EvolutionPath::Analytic);
}

TEST_CASE("closed system precesses at omega_s with unit length") {
  const auto sys = figure_system(0.4, 0.1, 0.0, 0.0);
  const auto grid = uniform_grid(2.0, 0.01);
  const InitialAngles a{1.0, 0.4};
  const auto tr = bloch_analytic(a, grid, KernelSource::on_the_fly(sys));
  for (const auto& s : tr.samples) {
    const auto r = s.state.bloch();
    CHECK(r[0] == doctest::Approx(std::cos(100.0 * s.t + 0.4) * std::sin(1.0)).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(std::sin(100.0 * s.t + 0.4) * std::sin(1.0)).epsilon(1e-12));
    CHECK(norm(r) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.entropy <= 1e-12);
  }
}

TEST_CASE("damping integrals against independent quadrature") {
  const auto sys = figure_system(0.4, 10.0, 1.0);
  const auto grid = uniform_grid(5.0, 0.5);
  const auto di = DampingIntegrals::build(grid, KernelSource::on_the_fly(sys));
  CHECK(di.r().front() == 0.0);
  CHECK(di.p().front() == 0.0);
  CHECK(di.q().front() == 0.0);
  auto opts = quad::Tolerance{1e-14, 1e-12};
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    const auto r = quad::integrate<double>(
        [&](double s) {
          const auto g = decay_rates(s, sys);
          return 0.5 * (g.gamma_plus + g.gamma_minus + 4.0 * g.gamma_z);
        },
        0.0, t, opts);
    auto p_of = [&](double s) {
      if (s == 0.0) return 0.0;
      return quad::integrate<double>(
                 [&](double u) {
                   const auto g = decay_rates(u, sys);
                   return g.gamma_plus + g.gamma_minus;
                 },
                 0.0, s, opts)
          .value;
    };
    const auto q = quad::integrate<double>(
        [&](double s) {
          const auto g = decay_rates(s, sys);
          return std::exp(p_of(s)) * (g.gamma_plus - g.gamma_minus);
        },
        0.0, t, {1e-12, 1e-10});
    CHECK(di.r()[i] == doctest::Approx(r.value).epsilon(1e-10));
    CHECK(di.p()[i] == doctest::Approx(p_of(t)).epsilon(1e-10));
    CHECK(di.q()[i] == doctest::Approx(q.value).epsilon(1e-8));
  }
}

TEST_CASE("Bloch length stays bounded and the Fig. 1(d) envelope decays late") {
  const auto sys = figure_system(0.4, 10.0, 0.0);
  const auto grid = uniform_grid(20.0, 0.01);
  const auto di = DampingIntegrals::build(grid, KernelSource::on_the_fly(sys));
  for (double theta : {0.0, kPi / 3, kPi / 2, kPi}) {
    for (const auto& r : bloch_vectors({theta, 0.0}, di, sys.dressed.omega_s)) CHECK(norm(r) <= 1.0 + 1e-12);
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] > 5.0) CHECK(di.r()[i] >= di.r()[i - 1]);
  }
}

TEST_CASE("large detuning suppresses decoherence of R_z") {
  const auto grid = uniform_grid(10.0, 0.01);
  // Starting from the dressed ground state, as in the Fig. 2 scenario.
  for (double theta : {kPi}) {
    const auto near = bloch_analytic({theta, 0.0}, grid, KernelSource::on_the_fly(figure_system(0.4, 0.1, 1.0)));
    const auto far = bloch_analytic({theta, 0.0}, grid, KernelSource::on_the_fly(figure_system(0.4, 10.0, 1.0)));
    CHECK(mean_abs_rz(far) > mean_abs_rz(near));
  }
}

TEST_CASE("entropy from the closed form matches the ODE eigenvalues") {
  const auto sys = figure_system(0.4, 0.1, 1.0);
  EvolveConfig cfg;
  cfg.t_max = 10.0;
  const auto grid = uniform_grid(10.0, 0.01);
  const auto src = KernelSource::on_the_fly(sys);
  const auto ode = evolve(QubitState::from_angles(kPi / 2, 0.0), grid, cfg, src);
  const auto an = bloch_analytic({kPi / 2, 0.0}, grid, src);
  double gap = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) gap = std::max(gap, std::abs(ode.samples[i].entropy - an.samples[i].entropy));
  CHECK(gap <= 1e-6);
}

TEST_CASE("pointer state") {
  SUBCASE("zero temperature, Fig. 4 parameters") {
    const auto p = pointer_angle(KernelSource::on_the_fly(figure_system(0.9, 0.1, 0.0)), 20.0);
    CHECK(p.thetas.size() == 128);
    CHECK(p.theta_p == kPi);
    CHECK(p.index == 127);
    const auto fine = pointer_angle(KernelSource::on_the_fly(figure_system(0.9, 0.1, 0.0)), 20.0, 255);
    CHECK(fine.theta_p == kPi);
  }
  SUBCASE("closed system ties resolve to pi") {
    const auto p = pointer_angle(KernelSource::on_the_fly(figure_system(0.9, 0.1, 0.0, 0.0)), 20.0);
    CHECK(p.theta_p == kPi);
    for (double e : p.mean_entropy) CHECK(e <= 1e-12);
  }
  SUBCASE("detuned thermal bath keeps the ground state") {
    for (double det : {10.0, 20.0}) {
      const auto p = pointer_angle(KernelSource::on_the_fly(figure_system(0.9, det, 1.0)), 20.0);
      CHECK(std::abs(p.theta_p - kPi) <= kPi / 127 + 1e-12);
    }
  }
  SUBCASE("resolution guard") {
    CHECK_THROWS_AS(pointer_angle(KernelSource::on_the_fly(figure_system(0.9, 0.1, 0.0)), 20.0, 32), InvalidArgument);
  }
}
