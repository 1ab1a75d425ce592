#include "psgd/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psgd/sampler.hpp"

namespace psgd {

double a_d(std::size_t d) {
  if (d < 1) throw std::invalid_argument("a_d: dimension must be at least 1");
  const double h = 0.5 * static_cast<double>(d);
  return std::exp(std::lgamma(h) - std::lgamma(h + 0.5)) / std::sqrt(std::numbers::pi);
}

StationaryDensity::StationaryDensity(const Objective& obj, double beta, double epsilon)
    : StationaryDensity(obj, beta, epsilon, a_d(obj.dim())) {}

StationaryDensity::StationaryDensity(const Objective& obj, double beta, double epsilon,
                                     double gradient_weight)
    : obj_(&obj),
      beta_(beta),
      epsilon_(epsilon),
      weight_(gradient_weight),
      floor_(beta * obj.grad_norm_bound() + 1.0 / epsilon),
      grad_(static_cast<Eigen::Index>(obj.dim())) {
  if (!(beta >= 0.0) || !(epsilon > 0.0) || !(gradient_weight >= 0.0)) {
    throw std::invalid_argument("stationary density needs beta >= 0, epsilon > 0, weight >= 0");
  }
}

double StationaryDensity::unnormalized(const VectorRef& theta) const {
  full_gradient(*obj_, theta, grad_);
  const double risk = empirical_risk(*obj_, theta);
  return (floor_ + weight_ * beta_ * grad_.norm()) * std::exp(-beta_ * risk);
}

namespace {

// Fills cell integrals of u on the grid; returns Z.
double integrate_cells(const StationaryDensity& sd, GridDensity& grid, std::size_t sub) {
  const std::size_t d = grid.resolution.size();
  std::size_t sub_points = 1;
  for (std::size_t a = 0; a < d; ++a) sub_points *= sub;
  const double node_weight = grid.cell_volume() / static_cast<double>(sub_points);
  Vector p(static_cast<Eigen::Index>(d));
  double total = 0.0;
  double peak = 0.0;
  for (std::size_t cell = 0; cell < grid.num_cells(); ++cell) {
    const Vector center = grid.cell_center(cell);
    double acc = 0.0;
    for (std::size_t s = 0; s < sub_points; ++s) {
      std::size_t rest = s;
      for (std::size_t a = 0; a < d; ++a) {
        const std::size_t i = rest % sub;
        rest /= sub;
        const double w = grid.cell_width(a);
        p[static_cast<Eigen::Index>(a)] =
            center[static_cast<Eigen::Index>(a)] - 0.5 * w + (static_cast<double>(i) + 0.5) * w /
                                                                 static_cast<double>(sub);
      }
      const double u = sd.unnormalized(p);
      peak = std::max(peak, u);
      acc += u;
    }
    grid.mass[cell] = acc * node_weight;
    total += grid.mass[cell];
  }
  grid.max_unnormalized = peak;
  return total;
}

}  // namespace

GridDensity normalize_on_grid(const StationaryDensity& sd, std::vector<std::size_t> resolution,
                              std::size_t subdivisions) {
  const TorusDomain& domain = sd.objective().domain();
  if (domain.dim() > 3) throw std::invalid_argument("grid normalization supports dim <= 3");
  if (resolution.size() != domain.dim()) throw DimensionMismatch(domain.dim(), resolution.size());
  for (std::size_t r : resolution) {
    if (r < 64) throw std::invalid_argument("grid resolution must be at least 64 per axis");
  }
  if (subdivisions == 0) throw std::invalid_argument("subdivisions must be positive");

  GridDensity grid(domain, resolution);
  const double z = integrate_cells(sd, grid, subdivisions);

  std::vector<std::size_t> fine_res = resolution;
  for (auto& r : fine_res) r *= 2;
  GridDensity fine(domain, fine_res);
  const double z_fine = integrate_cells(sd, fine, subdivisions);
  if (!(z > 0.0) || std::abs(z_fine - z) > 1e-4 * z_fine) {
    throw NonConvergentQuadrature("normalization changed by " +
                                  std::to_string(std::abs(z_fine - z) / z_fine) +
                                  " under 2x refinement");
  }
  grid.normalization = z;
  grid.max_unnormalized = std::max(grid.max_unnormalized, fine.max_unnormalized);
  for (auto& m : grid.mass) m /= z;
  return grid;
}

std::vector<Vector> sample_stationary_oracle(const StationaryDensity& sd, const GridDensity& grid,
                                             std::size_t n, RngStream& rng, OracleStats* stats) {
  const TorusDomain& domain = sd.objective().domain();
  const double envelope = 1.1 * grid.max_unnormalized;
  if (!(envelope > 0.0)) throw std::invalid_argument("oracle needs a normalized grid");
  OracleStats local;
  local.envelope = envelope;
  std::vector<Vector> out;
  out.reserve(n);
  while (out.size() < n) {
    Vector p = domain.sample_uniform(rng);
    const double u = sd.unnormalized(p);
    ++local.proposals;
    if (u > envelope) {
      throw EnvelopeViolation("density " + std::to_string(u) + " exceeds envelope " +
                              std::to_string(envelope));
    }
    if (rng.uniform() * envelope < u) {
      ++local.accepted;
      out.push_back(std::move(p));
    }
  }
  if (stats) *stats = local;
  return out;
}

CosPlusEstimate cos_plus_expectation_check(std::size_t d, std::size_t n, RngStream& rng) {
  if (d < 2) throw std::invalid_argument("cos_plus_expectation_check needs d >= 2");
  if (n < 2) throw std::invalid_argument("cos_plus_expectation_check needs n >= 2");
  Vector v(static_cast<Eigen::Index>(d));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    uniform_sphere(rng, v);
    const double x = std::max(v[0], 0.0);
    sum += x;
    sum_sq += x * x;
  }
  const double nn = static_cast<double>(n);
  CosPlusEstimate est;
  est.mean = sum / nn;
  est.standard_error = std::sqrt(std::max(0.0, sum_sq / nn - est.mean * est.mean) / (nn - 1.0));
  est.exact = 0.5 * a_d(d);
  const double dd = static_cast<double>(d);
  est.bracket_low = 1.0 / std::sqrt(2.0 * std::numbers::pi * dd);
  est.bracket_high = 1.0 / std::sqrt(2.0 * std::numbers::pi * (dd - 1.0));
  return est;
}

}  // namespace psgd
