#pragma once

#include "smm/state.hpp"

namespace smm {

// von Neumann entropy in nats from the Bloch-vector length. Lengths up to
// 1 + 1e-6 are clipped to 1; longer vectors are rejected.
double entropy(double bloch_length);
double entropy(const BlochVector& r);
double entropy(const QubitState& rho);

}  // namespace smm
