#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over a set of initial
// panels, for real, complex or small fixed-size vector integrands.

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace smm::quad {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const std::array<std::complex<double>, N>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

template <std::size_t N>
std::array<std::complex<double>, N> operator+(std::array<std::complex<double>, N> a,
                                              const std::array<std::complex<double>, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}
template <std::size_t N>
std::array<std::complex<double>, N> operator-(std::array<std::complex<double>, N> a,
                                              const std::array<std::complex<double>, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}
template <std::size_t N>
std::array<std::complex<double>, N> operator*(double s, std::array<std::complex<double>, N> a) {
  for (auto& x : a) x *= s;
  return a;
}

template <class V>
struct Result {
  V value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-10;
  std::size_t max_intervals = 200000;
};

namespace detail {

template <class V>
struct Interval {
  double a, b;
  V value;
  double error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class V, class F>
Interval<V> kronrod15(F& f, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  static const auto& xk = gauss_kronrod<double, 15>::abscissa();
  static const auto& wk = gauss_kronrod<double, 15>::weights();
  static const auto& wg = gauss<double, 7>::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  // xk[0] = 0 is shared by both rules; odd Kronrod indices are Gauss nodes.
  const V f0 = f(mid);
  V kron = wk[0] * f0;
  V gs = wg[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const V fs = f(mid - half * xk[i]) + f(mid + half * xk[i]);
    kron = kron + wk[i] * fs;
    if (i % 2 == 0) gs = gs + wg[i / 2] * fs;
  }
  kron = half * kron;
  gs = half * gs;
  return {a, b, kron, magnitude(kron - gs)};
}

}  // namespace detail

template <class V, class F>
Result<V> integrate(F&& f, std::span<const double> edges, const Tolerance& tol) {
  using detail::Interval;
  std::priority_queue<Interval<V>> heap;
  Result<V> out;
  double total_error = 0.0;
  V total{};
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] == edges[i]) continue;
    auto iv = detail::kronrod15<V>(f, edges[i], edges[i + 1]);
    out.evaluations += 15;
    total = total + iv.value;
    total_error += iv.error;
    heap.push(iv);
  }
  auto done = [&] { return total_error <= std::max(tol.abs, tol.rel * magnitude(total)); };
  while (!heap.empty() && !done() && heap.size() < tol.max_intervals) {
    const Interval<V> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further
    heap.pop();
    auto left = detail::kronrod15<V>(f, worst.a, mid);
    auto right = detail::kronrod15<V>(f, mid, worst.b);
    out.evaluations += 30;
    total = total - worst.value + left.value + right.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated rounding from the running updates.
  V sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum = sum + heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  out.converged = err <= std::max(tol.abs, tol.rel * magnitude(sum));
  return out;
}

template <class V, class F>
Result<V> integrate(F&& f, double a, double b, const Tolerance& tol) {
  const std::array<double, 2> edges{a, b};
  return integrate<V>(std::forward<F>(f), std::span<const double>(edges), tol);
}

// Fixed 10-point Gauss-Legendre on [a, b].
template <class F>
auto gauss10(F&& f, double a, double b) {
  // Even order: the positive abscissae exclude 0.
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  using V = decltype(f(c));
  V acc{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc = acc + (h * w[i]) * (f(c - h * x[i]) + f(c + h * x[i]));
  }
  return acc;
}

}  // namespace smm::quad
