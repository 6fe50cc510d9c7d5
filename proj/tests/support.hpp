#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "smm/bath.hpp"
#include "smm/model.hpp"

namespace smm::testing {

inline constexpr double kPi = std::numbers::pi;

// Figure regime: omega_s = 100, drive 500, u^2 = 0.1, T in units of omega_s.
inline OpenSystem figure_system(double ratio, double detuning, double temperature, double u2 = 0.1) {
  OpenSystem sys;
  sys.omega = 500.0;
  sys.dressed = dressed_params(SystemParams::from_dressed(100.0, ratio, sys.omega));
  sys.bath = BathSpec{u2, 1.0, sys.omega + detuning, temperature * sys.dressed.omega_s, ResonantApprox{}};
  return sys;
}

inline Matrix2c random_density(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix2c a;
  a << Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng));
  Matrix2c rho = a * a.adjoint();
  return rho / rho.trace();
}

inline double max_abs(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace smm::testing
