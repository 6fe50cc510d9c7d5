#pragma once

#include <Eigen/Dense>
#include <complex>

namespace smm {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

// Physical inputs of the driven chiral qubit. All frequencies are angular
// frequencies in units of the bath linewidth (lambda = 1), hbar = k_B = 1.
struct SystemParams {
  double omega_so = 0.0;  // spin-orbit splitting
  double omega = 0.0;     // electric-field drive frequency
  double d_eps = 0.0;     // spin-electric coupling d*epsilon
  double alpha = 0.0;     // field phase; kept at 0

  // Builds parameters from the dressed splitting and the ratio
  // Delta_so / omega_s, which is how the figure scenarios are specified.
  static SystemParams from_dressed(double omega_s, double detuning_ratio, double omega);

  void validate() const;
};

struct DressedParams {
  double delta_so = 0.0;     // omega_so - omega
  double omega_s = 0.0;      // sqrt(delta_so^2 + d_eps^2)
  double delta_plus = 0.0;   // (omega_s + delta_so) / (2 omega_s)
  double delta_minus = 0.0;  // (omega_s - delta_so) / (2 omega_s)
  double delta_zero = 0.0;   // sqrt(delta_plus * delta_minus)
};

DressedParams dressed_params(const SystemParams& p);

// Chirality operators in the dressed basis ordered (up, down).
namespace chiral {
Matrix2c z();      // diag(1, -1)
Matrix2c raise();  // |up><down|
Matrix2c lower();  // |down><up|
Matrix2c x();      // (raise + lower) / 2
Matrix2c identity();

// Pauli matrices used for the Bloch-vector view; sigma_x = 2 * x().
Matrix2c sigma_x();
Matrix2c sigma_y();
}  // namespace chiral

// Columns are the eigenvectors |psi_+>, |psi_->, expressed in the
// chirality basis {|C=+1>, |C=-1>}.
Matrix2c dressing_transform(const DressedParams& d);

class QubitState;

// rho_bar = U^dagger rho U
QubitState transform_to_dressed(const QubitState& lab, const DressedParams& d);
QubitState transform_to_lab(const QubitState& dressed, const DressedParams& d);

}  // namespace smm
