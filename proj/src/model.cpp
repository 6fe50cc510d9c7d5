#include "smm/model.hpp"

#include <cmath>
#include <string>

#include "smm/errors.hpp"
#include "smm/state.hpp"

namespace smm {

SystemParams SystemParams::from_dressed(double omega_s, double detuning_ratio, double omega) {
  if (!(omega_s > 0.0) || !std::isfinite(omega_s)) {
    throw InvalidArgument("omega_s must be positive and finite");
  }
  if (!(std::abs(detuning_ratio) <= 1.0)) {
    throw InvalidArgument("Delta_so/omega_s must lie in [-1, 1]");
  }
  SystemParams p;
  const double delta_so = detuning_ratio * omega_s;
  p.omega = omega;
  p.omega_so = omega + delta_so;
  p.d_eps = omega_s * std::sqrt(std::max(0.0, 1.0 - detuning_ratio * detuning_ratio));
  p.validate();
  return p;
}

void SystemParams::validate() const {
  if (!std::isfinite(omega_so) || !std::isfinite(omega) || !std::isfinite(d_eps)) {
    throw InvalidArgument("system parameters must be finite");
  }
  if (!(omega_so > 0.0)) throw InvalidArgument("omega_so must be positive");
  if (d_eps < 0.0) throw InvalidArgument("d*epsilon must be non-negative");
}

DressedParams dressed_params(const SystemParams& p) {
  p.validate();
  DressedParams d;
  d.delta_so = p.omega_so - p.omega;
  d.omega_s = std::hypot(d.delta_so, p.d_eps);
  if (d.omega_s == 0.0) {
    throw DegenerateDressedBasis("Delta_so = d*epsilon = 0: dressed basis undefined");
  }
  const double ratio = d.delta_so / d.omega_s;
  d.delta_plus = 0.5 * (1.0 + ratio);
  d.delta_minus = 0.5 * (1.0 - ratio);
  // d_eps / (2 omega_s) is the same quantity without the cancellation in
  // delta_plus * delta_minus near the edges.
  d.delta_zero = 0.5 * p.d_eps / d.omega_s;
  return d;
}

namespace chiral {

Matrix2c z() {
  Matrix2c m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix2c raise() {
  Matrix2c m;
  m << 0.0, 1.0, 0.0, 0.0;
  return m;
}

Matrix2c lower() {
  Matrix2c m;
  m << 0.0, 0.0, 1.0, 0.0;
  return m;
}

Matrix2c x() { return 0.5 * (raise() + lower()); }

Matrix2c identity() { return Matrix2c::Identity(); }

Matrix2c sigma_x() { return raise() + lower(); }

Matrix2c sigma_y() {
  Matrix2c m;
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

}  // namespace chiral

Matrix2c dressing_transform(const DressedParams& d) {
  const double sp = std::sqrt(d.delta_plus);
  const double sm = std::sqrt(d.delta_minus);
  Matrix2c u;
  // |psi_+> = sqrt(d+)|+1> + sqrt(d-)|-1>,  |psi_-> = -sqrt(d-)|+1> + sqrt(d+)|-1>
  u << sp, -sm, sm, sp;
  return u;
}

QubitState transform_to_dressed(const QubitState& lab, const DressedParams& d) {
  const Matrix2c u = dressing_transform(d);
  return QubitState::from_matrix(u.adjoint() * lab.matrix() * u);
}

QubitState transform_to_lab(const QubitState& dressed, const DressedParams& d) {
  const Matrix2c u = dressing_transform(d);
  return QubitState::from_matrix(u * dressed.matrix() * u.adjoint());
}

}  // namespace smm
