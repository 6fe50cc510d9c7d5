#pragma once

#include <array>

#include "smm/model.hpp"

namespace smm {

using BlochVector = std::array<double, 3>;

double norm(const BlochVector& r);

struct StateTolerances {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double eigenvalue_floor = -1e-9;
};

// 2x2 reduced density matrix. Construction through the named factories
// validates Hermiticity, unit trace and (approximate) positivity.
class QubitState {
 public:
  static QubitState from_matrix(const Matrix2c& rho, const StateTolerances& tol = {});
  // No validation; used internally where invariants are tracked separately.
  static QubitState unchecked(const Matrix2c& rho);
  static QubitState from_bloch(const BlochVector& r);
  static QubitState from_angles(double theta, double phi);
  static QubitState maximally_mixed();

  const Matrix2c& matrix() const { return rho_; }

  // R_j = Tr(rho sigma_j)
  BlochVector bloch() const;
  double trace_error() const;
  double hermiticity_error() const;
  double purity() const;
  // Ascending.
  std::array<double, 2> eigenvalues() const;

 private:
  explicit QubitState(const Matrix2c& rho) : rho_(rho) {}
  Matrix2c rho_;
};

// Max-norm of rho - rho^dagger.
double hermiticity_error(const Matrix2c& rho);

}  // namespace smm
