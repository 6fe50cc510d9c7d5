#include "smm/solution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "smm/errors.hpp"
#include "smm/quadrature.hpp"

namespace smm {

namespace {

constexpr double kPi = std::numbers::pi;

// Panel edges: grid points plus table nodes, each gap split to <= max_panel.
std::vector<double> refine(std::span<const double> grid, std::span<const double> nodes,
                           double max_panel) {
  std::vector<double> breaks(grid.begin(), grid.end());
  for (double n : nodes) {
    if (n > 0.0 && n < grid.back()) breaks.push_back(n);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-13 * (1.0 + std::abs(a)); }),
               breaks.end());
  std::vector<double> edges{breaks.front()};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    const auto m = static_cast<std::size_t>(std::ceil((b - a) / max_panel - 1e-9));
    for (std::size_t k = 1; k < m; ++k) edges.push_back(a + (b - a) * static_cast<double>(k) / m);
    edges.push_back(b);
  }
  return edges;
}

}  // namespace

void InitialAngles::validate() const {
  if (!(theta >= 0.0 && theta <= kPi)) throw InvalidArgument("theta must lie in [0, pi]");
  if (!(phi >= 0.0 && phi <= 2.0 * kPi)) throw InvalidArgument("phi must lie in [0, 2 pi]");
}

BlochVector InitialAngles::bloch() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

DampingIntegrals DampingIntegrals::build(std::span<const double> grid, const KernelSource& src,
                                         double max_panel) {
  if (grid.empty() || grid.front() != 0.0) throw InvalidArgument("grid must start at t = 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("grid must be strictly increasing");
  }
  if (!(max_panel > 0.0)) throw InvalidArgument("panel width must be positive");
  // Rates oscillate at up to max_frequency; keep panels within ~1 rad.
  max_panel = std::min(max_panel, 1.0 / src.max_frequency());

  DampingIntegrals di;
  di.t_.assign(grid.begin(), grid.end());
  di.r_.assign(grid.size(), 0.0);
  di.p_.assign(grid.size(), 0.0);
  di.q_.assign(grid.size(), 0.0);
  di.rates_.reserve(grid.size());
  di.rates_.push_back(src.rates(0.0));
  if (grid.size() == 1) return di;

  const auto edges = refine(grid, src.nodes(), max_panel);
  auto loss = [&](double t) {
    const RateSample r = src.rates(t);
    return r.gamma_plus + r.gamma_minus;
  };

  double r = 0.0, p = 0.0, q = 0.0;
  std::size_t next = 1;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    const double pa = p;
    r += quad::gauss10(
        [&](double t) {
          const RateSample s = src.rates(t);
          return 0.5 * (s.gamma_plus + s.gamma_minus + 4.0 * s.gamma_z);
        },
        a, b);
    p += quad::gauss10(loss, a, b);
    q += quad::gauss10(
        [&](double t) {
          const RateSample s = src.rates(t);
          const double pt = pa + quad::gauss10(loss, a, t);
          return std::exp(pt) * (s.gamma_plus - s.gamma_minus);
        },
        a, b);
    if (next < grid.size() && std::abs(b - grid[next]) <= 1e-13 * (1.0 + std::abs(b))) {
      di.r_[next] = r;
      di.p_[next] = p;
      di.q_[next] = q;
      di.rates_.push_back(src.rates(grid[next]));
      ++next;
    }
  }
  if (next != grid.size()) throw Error("internal: refined panels missed grid points");
  return di;
}

std::vector<BlochVector> bloch_vectors(const InitialAngles& a, const DampingIntegrals& di,
                                       double omega_s) {
  const auto& t = di.times();
  std::vector<BlochVector> out(t.size());
  const double st = std::sin(a.theta);
  const double ct = std::cos(a.theta);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double env = std::exp(-di.r()[i]);
    const double phase = omega_s * t[i] + a.phi;
    out[i] = {env * std::cos(phase) * st, env * std::sin(phase) * st,
              std::exp(-di.p()[i]) * (ct + di.q()[i])};
  }
  return out;
}

Trajectory bloch_analytic(const InitialAngles& a, std::span<const double> grid,
                          const KernelSource& src, double max_panel) {
  a.validate();
  const auto di = DampingIntegrals::build(grid, src, max_panel);
  const auto vecs = bloch_vectors(a, di, src.system().dressed.omega_s);

  Trajectory traj;
  traj.path = EvolutionPath::Analytic;
  traj.system = src.system();
  traj.config.t_max = grid.back();
  traj.samples.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = vecs[i];
    const Matrix2c rho = 0.5 * (chiral::identity() + r[0] * chiral::sigma_x() +
                                r[1] * chiral::sigma_y() + r[2] * chiral::z());
    const QubitState s = QubitState::unchecked(rho);
    traj.invariants.observe(rho, s);
    if (s.eigenvalues()[0] < -1e-6) {
      std::ostringstream os;
      os << "analytic Bloch vector leaves the unit ball (|R| = " << norm(r) << ") at t = " << grid[i];
      throw IntegrationError(os.str(), grid[i]);
    }
    TrajectorySample sample;
    sample.t = grid[i];
    sample.state = s;
    sample.rates = di.rates()[i];
    sample.entropy = entropy(r);
    traj.samples.push_back(sample);
  }
  return traj;
}

PointerStateResult pointer_angle(const KernelSource& src, double t_max, std::size_t n_theta,
                                 double time_step) {
  if (n_theta < 64) throw InvalidArgument("theta grid needs at least 64 points");
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
  const auto grid = uniform_grid(t_max, time_step);
  const auto di = DampingIntegrals::build(grid, src);
  const double omega_s = src.system().dressed.omega_s;

  PointerStateResult res;
  res.thetas.resize(n_theta);
  res.mean_entropy.resize(n_theta);
  for (std::size_t k = 0; k < n_theta; ++k) {
    res.thetas[k] = kPi * static_cast<double>(k) / static_cast<double>(n_theta - 1);
  }
  res.thetas.back() = kPi;

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_theta); ++k) {
    const auto vecs = bloch_vectors({res.thetas[k], 0.0}, di, omega_s);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      acc += 0.5 * (grid[i + 1] - grid[i]) * (entropy(vecs[i]) + entropy(vecs[i + 1]));
    }
    res.mean_entropy[k] = acc / grid.back();
  }

  const double best = *std::min_element(res.mean_entropy.begin(), res.mean_entropy.end());
  for (std::size_t k = n_theta; k-- > 0;) {
    if (res.mean_entropy[k] <= best + 1e-14) {
      res.index = k;
      break;
    }
  }
  res.theta_p = res.thetas[res.index];
  return res;
}

}  // namespace smm
