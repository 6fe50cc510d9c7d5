#include "smm/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "smm/errors.hpp"
#include "smm/quadrature.hpp"

namespace smm {

namespace {

constexpr double kPi = std::numbers::pi;

// Quadrature targets for ExactQuadrature.
constexpr double kAbsTolPerU2 = 1e-10;
constexpr double kRelTol = 1e-8;
constexpr std::size_t kMaxIntervals = 2000000;

double default_omega_max(const OpenSystem& sys) {
  return std::max(sys.bath.omega0, sys.omega + sys.dressed.omega_s) + 50.0 * sys.bath.lambda;
}

// Panel edges over [a, b]: geometric near the infrared end, then uniform panels
// no wider than pi / (5 t) so the phase exp(i Delta t) is resolved.
std::vector<double> panel_edges(double a, double b, double t, double lambda) {
  std::vector<double> edges{a};
  const double knee = std::min(lambda, b);
  double x = a;
  while (x * 10.0 < knee) {
    x *= 10.0;
    edges.push_back(x);
  }
  if (knee > edges.back()) edges.push_back(knee);
  double width = 0.5 * lambda;
  if (t > 0.0) width = std::min(width, kPi / (5.0 * t));
  const double span = b - edges.back();
  if (span > 0.0) {
    const auto n = static_cast<std::size_t>(std::ceil(span / width));
    const double start = edges.back();
    for (std::size_t i = 1; i <= n; ++i) edges.push_back(start + span * static_cast<double>(i) / n);
    edges.back() = b;
  }
  return edges;
}

KernelPair quadrature_kernels(double t, int q, const OpenSystem& sys, const ExactQuadrature& eq) {
  const BathSpec& b = sys.bath;
  const double lo = eq.ir_cutoff;
  const double hi = eq.omega_max.value_or(default_omega_max(sys));
  if (!(hi > lo)) throw InvalidArgument("omega_max must exceed the infrared cutoff");
  const double shift = sys.channel_frequency(q);
  const auto edges = panel_edges(lo, hi, t, b.lambda);

  const bool thermal = b.temperature > 0.0;
  // {n * J * g, J * g}
  auto integrand = [&](double w) {
    const Complex jg = spectral_density(w, b) * detail::phase_integral(w - shift, t);
    const double n = thermal ? mean_occupation(w, b.temperature) : 0.0;
    return std::array<Complex, 2>{n * jg, jg};
  };
  const quad::Tolerance tol{kAbsTolPerU2 * b.u2, kRelTol, kMaxIntervals};
  const auto res = quad::integrate<std::array<Complex, 2>>(integrand, std::span<const double>(edges), tol);

  KernelPair out;
  out.gamma = res.value[0];
  out.gamma_prime = res.value[0] + res.value[1];
  out.abs_error = 2.0 * res.error;
  if (!res.converged) {
    const double target = std::max(tol.abs, tol.rel * quad::magnitude(res.value));
    std::ostringstream os;
    os << "kernel quadrature did not converge at t = " << t << " (q = " << q
       << "): error estimate " << res.error << " > " << target;
    throw QuadratureError(os.str(), res.error, target);
  }

  // Neglected weight above omega_max times the largest |phase integral| there.
  const double tail_weight =
      b.u2 * b.lambda / (2.0 * kPi) * (kPi / 2.0 - std::atan((hi - b.omega0) / b.lambda));
  const double edge_detuning = hi - shift;
  double g_max = t;
  if (edge_detuning > 0.0) g_max = std::min(t, 2.0 / edge_detuning);
  out.tail_bound = (mean_occupation(hi, b.temperature) + 1.0) * tail_weight * g_max;
  return out;
}

}  // namespace

std::string strategy_name(const OccupationStrategy& s) {
  return std::holds_alternative<ResonantApprox>(s) ? "resonant" : "quadrature";
}

void BathSpec::validate() const {
  if (!(u2 >= 0.0) || !std::isfinite(u2)) throw InvalidArgument("u^2 must be non-negative");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive");
  if (!std::isfinite(omega0)) throw InvalidArgument("omega_0 must be finite");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("temperature must be non-negative");
  }
  if (const auto* eq = std::get_if<ExactQuadrature>(&strategy)) {
    if (!(eq->ir_cutoff > 0.0)) throw InvalidArgument("ir_cutoff must be positive");
    if (eq->omega_max && !(*eq->omega_max > eq->ir_cutoff)) {
      throw InvalidArgument("omega_max must exceed ir_cutoff");
    }
  }
}

double spectral_density(double w, const BathSpec& b) {
  const double x = w - b.omega0;
  return b.u2 * b.lambda * b.lambda / (2.0 * kPi * (x * x + b.lambda * b.lambda));
}

double mean_occupation(double w, double temperature) {
  if (!(w > 0.0)) {
    std::ostringstream os;
    os << "mode frequency must be positive for a Bose occupation (got " << w << ")";
    throw InvalidArgument(os.str());
  }
  if (temperature < 0.0) throw InvalidArgument("temperature must be non-negative");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(w / temperature);
}

namespace detail {

Complex relaxing_integral(Complex z, double t) {
  const Complex w = z * t;
  if (std::abs(w) < 1e-3) {
    return t * (1.0 - w / 2.0 + w * w / 6.0 - w * w * w / 24.0 + w * w * w * w / 120.0);
  }
  return (1.0 - std::exp(-w)) / z;
}

Complex phase_integral(double w, double t) { return relaxing_integral(Complex(0.0, -w), t); }

}  // namespace detail

KernelPair kernels(double t, Channel q, const OpenSystem& sys) {
  if (!(t >= 0.0)) throw InvalidArgument("kernel time must be non-negative");
  const BathSpec& b = sys.bath;
  const int c = charge(q);
  if (const auto* eq = std::get_if<ExactQuadrature>(&b.strategy)) {
    if (t == 0.0) return {};
    return quadrature_kernels(t, c, sys, *eq);
  }
  const double nbar = mean_occupation(sys.channel_frequency(c), b.temperature);
  const Complex base = 0.5 * b.u2 * b.lambda *
                       detail::relaxing_integral(Complex(b.lambda, -sys.channel_detuning(c)), t);
  KernelPair out;
  out.gamma = nbar * base;
  out.gamma_prime = (nbar + 1.0) * base;
  return out;
}

KernelSample kernel_sample(double t, const OpenSystem& sys) {
  KernelSample s;
  s.t = t;
  for (Channel c : kChannels) s[c] = kernels(t, c, sys);
  return s;
}

RateSample rates_from_kernels(const KernelSample& k, const DressedParams& d) {
  RateSample r;
  r.t = k.t;
  const double d0 = d.delta_zero * d.delta_zero;
  const double dp = d.delta_plus * d.delta_plus;
  const double dm = d.delta_minus * d.delta_minus;
  r.gamma_z = 2.0 * d0 * (k[Channel::Zero].gamma + k[Channel::Zero].gamma_prime).real();
  r.gamma_plus =
      2.0 * dp * k[Channel::Plus].gamma.real() + 2.0 * dm * k[Channel::Minus].gamma_prime.real();
  r.gamma_minus =
      2.0 * dm * k[Channel::Minus].gamma.real() + 2.0 * dp * k[Channel::Plus].gamma_prime.real();
  return r;
}

RateSample decay_rates(double t, const OpenSystem& sys) {
  return rates_from_kernels(kernel_sample(t, sys), sys.dressed);
}

MarkovianRates markovian_limits(const OpenSystem& sys) {
  if (!std::holds_alternative<ResonantApprox>(sys.bath.strategy)) {
    throw InvalidArgument("Markovian limits are defined for the resonant approximation");
  }
  const BathSpec& b = sys.bath;
  std::array<double, 3> vac{};  // Re Gamma'_q / (n + 1) at t -> infinity
  std::array<double, 3> nbar{};
  for (Channel c : kChannels) {
    const double dq = sys.channel_detuning(charge(c));
    vac[index(c)] = b.u2 * b.lambda * b.lambda / (2.0 * (b.lambda * b.lambda + dq * dq));
    nbar[index(c)] = mean_occupation(sys.channel_frequency(charge(c)), b.temperature);
  }
  auto re_g = [&](Channel c) { return nbar[index(c)] * vac[index(c)]; };
  auto re_gp = [&](Channel c) { return (nbar[index(c)] + 1.0) * vac[index(c)]; };
  const DressedParams& d = sys.dressed;
  MarkovianRates m;
  m.gamma_z = 2.0 * d.delta_zero * d.delta_zero * (re_g(Channel::Zero) + re_gp(Channel::Zero));
  m.gamma_plus = 2.0 * d.delta_plus * d.delta_plus * re_g(Channel::Plus) +
                 2.0 * d.delta_minus * d.delta_minus * re_gp(Channel::Minus);
  m.gamma_minus = 2.0 * d.delta_minus * d.delta_minus * re_g(Channel::Minus) +
                  2.0 * d.delta_plus * d.delta_plus * re_gp(Channel::Plus);
  return m;
}

}  // namespace smm
