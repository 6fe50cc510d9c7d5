#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <variant>

#include "smm/model.hpp"

namespace smm {

// n(w) frozen at each channel frequency omega + q*omega_s; the frequency
// integral then runs over the whole real line in closed form.
struct ResonantApprox {};

// Frequency integral done numerically over [ir_cutoff, omega_max] with the
// true Bose occupation. omega_max defaults to max(omega_0, omega + omega_s)
// + 50 lambda so every channel resonance lies inside the range.
struct ExactQuadrature {
  double ir_cutoff = 1e-6;
  std::optional<double> omega_max;
};

using OccupationStrategy = std::variant<ResonantApprox, ExactQuadrature>;

std::string strategy_name(const OccupationStrategy& s);

// Lorentzian bath J(w) = u^2 lambda^2 / (2 pi [(w - w0)^2 + lambda^2]).
// u2 = 0 is accepted and describes the closed system.
struct BathSpec {
  double u2 = 0.1;
  double lambda = 1.0;
  double omega0 = 0.0;
  double temperature = 0.0;
  OccupationStrategy strategy = ResonantApprox{};

  void validate() const;
};

// Everything the kernels and rates depend on.
struct OpenSystem {
  DressedParams dressed;
  BathSpec bath;
  double omega = 0.0;  // drive frequency

  double channel_frequency(int q) const { return omega + q * dressed.omega_s; }
  // delta_q = omega_0 - omega - q*omega_s
  double channel_detuning(int q) const { return bath.omega0 - channel_frequency(q); }
};

enum class Channel : int { Minus = -1, Zero = 0, Plus = 1 };

constexpr int index(Channel c) { return static_cast<int>(c) + 1; }
constexpr int charge(Channel c) { return static_cast<int>(c); }
inline constexpr std::array<Channel, 3> kChannels{Channel::Zero, Channel::Plus, Channel::Minus};

double spectral_density(double w, const BathSpec& b);

// Bose occupation 1/(exp(w/T) - 1); 0 at T = 0.
double mean_occupation(double w, double temperature);

// Gamma_q (thermal, n) and Gamma'_q (n + 1) at one time.
struct KernelPair {
  Complex gamma{};
  Complex gamma_prime{};
  // Quadrature error estimate (0 for closed form).
  double abs_error = 0.0;
  // Bound on the neglected spectral tail above omega_max (quadrature only).
  double tail_bound = 0.0;
};

struct KernelSample {
  double t = 0.0;
  std::array<KernelPair, 3> channels{};

  const KernelPair& operator[](Channel c) const { return channels[index(c)]; }
  KernelPair& operator[](Channel c) { return channels[index(c)]; }
};

KernelPair kernels(double t, Channel q, const OpenSystem& sys);
KernelSample kernel_sample(double t, const OpenSystem& sys);

// Time-local decay rates; may go negative.
struct RateSample {
  double t = 0.0;
  double gamma_z = 0.0;
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
};

RateSample rates_from_kernels(const KernelSample& k, const DressedParams& d);
RateSample decay_rates(double t, const OpenSystem& sys);

struct MarkovianRates {
  double gamma_z = 0.0;
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
};

// Long-time limit of the rates; requires ResonantApprox.
MarkovianRates markovian_limits(const OpenSystem& sys);

namespace detail {
// (1 - exp(-z t)) / z, accurate for small |z t|.
Complex relaxing_integral(Complex z, double t);
// (exp(i w t) - 1) / (i w), accurate for small |w t|.
Complex phase_integral(double w, double t);
}  // namespace detail

}  // namespace smm
