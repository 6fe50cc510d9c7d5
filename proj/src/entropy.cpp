#include "smm/entropy.hpp"

#include <cmath>
#include <sstream>

#include "smm/errors.hpp"

namespace smm {

namespace {
double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }
}  // namespace

double entropy(double bloch_length) {
  if (!(bloch_length >= 0.0)) throw InvalidArgument("Bloch-vector length must be non-negative");
  if (bloch_length > 1.0 + 1e-6) {
    std::ostringstream os;
    os << "Bloch-vector length " << bloch_length << " exceeds 1: not a density matrix";
    throw InvalidState(os.str());
  }
  const double r = std::min(bloch_length, 1.0);
  return -(xlogx(0.5 * (1.0 + r)) + xlogx(0.5 * (1.0 - r)));
}

double entropy(const BlochVector& r) { return entropy(norm(r)); }

double entropy(const QubitState& rho) {
  const auto v = rho.eigenvalues();
  if (v[0] < -5e-7) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << v[0] << " below zero";
    throw InvalidState(os.str());
  }
  return -(xlogx(v[0]) + xlogx(v[1]));
}

}  // namespace smm
