#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smm/engine.hpp"
#include "smm/entropy.hpp"

namespace smm {

// Bloch angles of the initial dressed-basis state.
struct InitialAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi]

  void validate() const;
  BlochVector bloch() const;
};

// Cumulative rate integrals on a time grid:
//   r(t) = 1/2 int (g+ + g- + 4 gz),  p(t) = int (g+ + g-),
//   q(t) = int exp(p) (g+ - g-).
class DampingIntegrals {
 public:
  // Integrates on a refinement of `grid` whose panels are no wider than
  // `max_panel` and also break at the source's table nodes, with 10-point
  // Gauss-Legendre on each panel.
  static DampingIntegrals build(std::span<const double> grid, const KernelSource& src,
                                double max_panel = 0.01);

  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }
  const std::vector<RateSample>& rates() const { return rates_; }

 private:
  std::vector<double> t_, r_, p_, q_;
  std::vector<RateSample> rates_;
};

// Bloch vector at every time of the integrals' grid.
std::vector<BlochVector> bloch_vectors(const InitialAngles& a, const DampingIntegrals& di,
                                       double omega_s);

// Closed-form Bloch solution of the Lindblad-only master equation.
Trajectory bloch_analytic(const InitialAngles& a, std::span<const double> grid,
                          const KernelSource& src, double max_panel = 0.01);

struct PointerStateResult {
  double theta_p = 0.0;
  std::size_t index = 0;
  std::vector<double> thetas;
  std::vector<double> mean_entropy;  // (1/t_max) int_0^t_max E dt per theta
};

// Initial polar angle (phi = 0) whose time-averaged entropy over
// [0, t_max] is smallest. Ties go to the larger angle.
PointerStateResult pointer_angle(const KernelSource& src, double t_max, std::size_t n_theta = 128,
                                 double time_step = 0.01);

}  // namespace smm
