#include <random>

#include "doctest.h"
#include "smm/errors.hpp"
#include "smm/model.hpp"
#include "smm/state.hpp"
#include "support.hpp"

using namespace smm;
using smm::testing::max_abs;

TEST_CASE("dressed coefficients for the Fig. 1 ratio") {
  // Oracle: the coefficient formulas evaluated from (Delta, d_eps) directly.
  const double omega_s = 100.0, delta = 40.0;
  const double d_eps = std::sqrt(omega_s * omega_s - delta * delta);
  const auto d = dressed_params(SystemParams{500.0 + delta, 500.0, d_eps});
  CHECK(d.omega_s == doctest::Approx(omega_s).epsilon(1e-14));
  CHECK(d.delta_plus == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(d.delta_minus == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(d.delta_zero == doctest::Approx(std::sqrt(0.21)).epsilon(1e-14));
  CHECK(d.delta_zero == doctest::Approx(0.45826).epsilon(1e-5));
}

TEST_CASE("no mixing without the electric coupling") {
  const auto d = dressed_params(SystemParams{12.0, 10.0, 0.0});
  CHECK(d.omega_s == 2.0);
  CHECK(d.delta_plus == 1.0);
  CHECK(d.delta_minus == 0.0);
  CHECK(d.delta_zero == 0.0);
}

TEST_CASE("resonant drive gives equal weights") {
  const auto d = dressed_params(SystemParams{10.0, 10.0, 3.0});
  CHECK(d.delta_plus == 0.5);
  CHECK(d.delta_minus == 0.5);
  CHECK(d.delta_zero == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("degenerate dressed basis is rejected") {
  CHECK_THROWS_AS(dressed_params(SystemParams{10.0, 10.0, 0.0}), DegenerateDressedBasis);
  CHECK_THROWS_AS(SystemParams({-1.0, 10.0, 1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SystemParams({1.0, 10.0, -1.0}).validate(), InvalidArgument);
}

TEST_CASE("weights sum to one and delta_0 is their geometric mean") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0), e(0.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const auto d = dressed_params(SystemParams{500.0 + u(rng), 500.0, e(rng) + 1e-3});
    CHECK(d.delta_plus + d.delta_minus == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.delta_plus >= 0.0);
    CHECK(d.delta_minus >= 0.0);
    CHECK(d.delta_zero == doctest::Approx(std::sqrt(d.delta_plus * d.delta_minus)).epsilon(1e-12));
    CHECK(d.delta_zero <= 0.5 + 1e-15);
  }
}

TEST_CASE("from_dressed reproduces the requested dressed splitting and ratio") {
  for (double x : {-0.9, -0.4, 0.0, 0.1, 0.4, 0.7, 0.9, 1.0}) {
    const auto d = dressed_params(SystemParams::from_dressed(100.0, x, 500.0));
    CHECK(d.omega_s == doctest::Approx(100.0).epsilon(1e-13));
    CHECK(d.delta_so / d.omega_s == doctest::Approx(x).epsilon(1e-13));
  }
}

TEST_CASE("coefficients are continuous across Delta_so = 0") {
  const double h = 1e-9 * 100.0;
  const auto a = dressed_params(SystemParams{500.0 + h, 500.0, 100.0});
  const auto b = dressed_params(SystemParams{500.0 - h, 500.0, 100.0});
  CHECK(std::abs(a.delta_plus - b.delta_plus) < 1e-6);
  CHECK(std::abs(a.delta_minus - b.delta_minus) < 1e-6);
}

TEST_CASE("chirality operator algebra") {
  const Matrix2c up = (Matrix2c() << 1, 0, 0, 0).finished();
  const Matrix2c down = (Matrix2c() << 0, 0, 0, 1).finished();
  CHECK(max_abs(chiral::z() - (up - down)) == 0.0);
  CHECK(max_abs(chiral::raise() * down - chiral::raise()) == 0.0);  // C+ |down> = |up>
  CHECK(max_abs(chiral::raise() * up) == 0.0);
  CHECK(max_abs(chiral::lower() * up - chiral::lower()) == 0.0);
  CHECK(max_abs(chiral::x() - 0.5 * (chiral::raise() + chiral::lower())) == 0.0);
  CHECK(max_abs(chiral::raise().adjoint() - chiral::lower()) == 0.0);
}

TEST_CASE("maximally mixed state is basis invariant") {
  const auto d = dressed_params(SystemParams{540.0, 500.0, 91.6515138991168});
  const auto out = transform_to_dressed(QubitState::maximally_mixed(), d);
  CHECK(max_abs(out.matrix() - 0.5 * chiral::identity()) < 1e-15);
}

TEST_CASE("lower eigenvector maps to the dressed ground state") {
  const auto d = dressed_params(SystemParams{540.0, 500.0, 91.6515138991168});
  // |psi_-> = (-sqrt(delta_-), sqrt(delta_+)) in the chirality basis.
  Eigen::Vector2cd psi(-std::sqrt(d.delta_minus), std::sqrt(d.delta_plus));
  const auto lab = QubitState::from_matrix(psi * psi.adjoint());
  const auto out = transform_to_dressed(lab, d);
  const Matrix2c down = (Matrix2c() << 0, 0, 0, 1).finished();
  CHECK(max_abs(out.matrix() - down) < 1e-14);
}

TEST_CASE("equal weights: chirality eigenstate by explicit multiplication") {
  const auto d = dressed_params(SystemParams{10.0, 10.0, 3.0});
  // Oracle: U = [[a, -a], [a, a]] with a = 1/sqrt(2); rho = |C=+1><C=+1|.
  const double a = 1.0 / std::sqrt(2.0);
  const double u[2][2] = {{a, -a}, {a, a}};
  const double rho[2][2] = {{1.0, 0.0}, {0.0, 0.0}};
  double expected[2][2] = {};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) expected[i][j] += u[k][i] * rho[k][l] * u[l][j];
  const auto out = transform_to_dressed(QubitState::from_matrix((Matrix2c() << 1, 0, 0, 0).finished()), d);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(out.matrix()(i, j) - expected[i][j]) < 1e-15);
  CHECK(expected[0][1] == doctest::Approx(-0.5));
}

TEST_CASE("transform preserves trace, Hermiticity, spectrum and inverts") {
  std::mt19937_64 rng(11);
  const auto d = dressed_params(SystemParams{530.0, 500.0, 40.0});
  for (int i = 0; i < 200; ++i) {
    const auto lab = QubitState::from_matrix(smm::testing::random_density(rng));
    const auto bar = transform_to_dressed(lab, d);
    CHECK(bar.trace_error() <= 1e-12);
    CHECK(bar.hermiticity_error() <= 1e-12);
    const auto e0 = lab.eigenvalues(), e1 = bar.eigenvalues();
    CHECK(std::abs(e0[0] - e1[0]) <= 1e-12);
    CHECK(std::abs(e0[1] - e1[1]) <= 1e-12);
    CHECK(max_abs(transform_to_lab(bar, d).matrix() - lab.matrix()) <= 1e-12);
  }
}

TEST_CASE("invalid density matrices are rejected") {
  CHECK_THROWS_AS(QubitState::from_matrix((Matrix2c() << 1, 0, 0, 1).finished()), InvalidState);
  CHECK_THROWS_AS(QubitState::from_matrix((Matrix2c() << 0.5, 0.1, 0.2, 0.5).finished()), InvalidState);
  CHECK_THROWS_AS(QubitState::from_matrix((Matrix2c() << 1.5, 0, 0, -0.5).finished()), InvalidState);
  CHECK_THROWS_AS(transform_to_dressed(QubitState::unchecked((Matrix2c() << 2, 0, 0, -1).finished()),
                                       dressed_params(SystemParams{12.0, 10.0, 1.0})),
                  InvalidState);
}

TEST_CASE("Bloch view of angle states") {
  const double theta = 1.1, phi = 2.3;
  const auto r = QubitState::from_angles(theta, phi).bloch();
  CHECK(r[0] == doctest::Approx(std::sin(theta) * std::cos(phi)).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(std::sin(theta) * std::sin(phi)).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(std::cos(theta)).epsilon(1e-14));
  CHECK(norm(r) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(QubitState::from_angles(0.0, 0.0).matrix()(0, 0).real() == 1.0);
}
