#include "smm/state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "smm/errors.hpp"

namespace smm {

double norm(const BlochVector& r) { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); }

double hermiticity_error(const Matrix2c& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

QubitState QubitState::from_matrix(const Matrix2c& rho, const StateTolerances& tol) {
  if (!rho.allFinite()) throw InvalidState("density matrix has non-finite entries");
  const double herm = smm::hermiticity_error(rho);
  if (herm > tol.hermiticity) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max |rho - rho^dag| = " << herm << ")";
    throw InvalidState(os.str());
  }
  const QubitState s(rho);
  if (s.trace_error() > tol.trace) {
    std::ostringstream os;
    os << "density matrix trace deviates from 1 by " << s.trace_error();
    throw InvalidState(os.str());
  }
  const auto ev = s.eigenvalues();
  if (ev[0] < tol.eigenvalue_floor) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << ev[0];
    throw InvalidState(os.str());
  }
  return s;
}

QubitState QubitState::unchecked(const Matrix2c& rho) { return QubitState(rho); }

QubitState QubitState::from_bloch(const BlochVector& r) {
  const Matrix2c rho = 0.5 * (chiral::identity() + r[0] * chiral::sigma_x() +
                              r[1] * chiral::sigma_y() + r[2] * chiral::z());
  return from_matrix(rho);
}

QubitState QubitState::from_angles(double theta, double phi) {
  return from_bloch({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                     std::cos(theta)});
}

QubitState QubitState::maximally_mixed() { return QubitState(0.5 * chiral::identity()); }

BlochVector QubitState::bloch() const {
  // Tr(rho sigma_x) = 2 Re rho_01, Tr(rho sigma_y) = -2 Im rho_01
  const Complex c = 0.5 * (rho_(0, 1) + std::conj(rho_(1, 0)));
  return {2.0 * c.real(), -2.0 * c.imag(), (rho_(0, 0) - rho_(1, 1)).real()};
}

double QubitState::trace_error() const { return std::abs(rho_.trace() - 1.0); }

double QubitState::hermiticity_error() const { return smm::hermiticity_error(rho_); }

double QubitState::purity() const { return (rho_ * rho_).trace().real(); }

std::array<double, 2> QubitState::eigenvalues() const {
  const Matrix2c h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(h, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

}  // namespace smm
