#include "psgd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace psgd {

GridDensity::GridDensity(TorusDomain d, std::vector<std::size_t> res)
    : domain(std::move(d)), resolution(std::move(res)) {
  if (resolution.size() != domain.dim()) throw DimensionMismatch(domain.dim(), resolution.size());
  std::size_t cells = 1;
  for (std::size_t r : resolution) {
    if (r == 0) throw std::invalid_argument("grid resolution must be positive");
    cells *= r;
  }
  mass.assign(cells, 0.0);
}

double GridDensity::cell_width(std::size_t axis) const {
  return domain.side_lengths()[axis] / static_cast<double>(resolution[axis]);
}

double GridDensity::cell_volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < resolution.size(); ++a) v *= cell_width(a);
  return v;
}

std::size_t GridDensity::cell_index(const VectorRef& p) const {
  require_dim(domain.dim(), p.size());
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t a = 0; a < resolution.size(); ++a) {
    const double rel = (p[static_cast<Eigen::Index>(a)] - domain.origin()[a]) / cell_width(a);
    if (!(rel >= 0.0) || rel >= static_cast<double>(resolution[a]) + 1e-9) {
      throw std::out_of_range("point outside the grid box");
    }
    const auto i = std::min(static_cast<std::size_t>(rel), resolution[a] - 1);
    index += i * stride;
    stride *= resolution[a];
  }
  return index;
}

Vector GridDensity::cell_center(std::size_t index) const {
  Vector c(static_cast<Eigen::Index>(resolution.size()));
  for (std::size_t a = 0; a < resolution.size(); ++a) {
    const std::size_t i = index % resolution[a];
    index /= resolution[a];
    c[static_cast<Eigen::Index>(a)] =
        domain.origin()[a] + (static_cast<double>(i) + 0.5) * cell_width(a);
  }
  return c;
}

std::vector<double> GridDensity::marginal_masses(std::size_t axis) const {
  if (axis >= resolution.size()) throw std::out_of_range("grid axis out of range");
  std::vector<double> out(resolution[axis], 0.0);
  std::size_t stride = 1;
  for (std::size_t a = 0; a < axis; ++a) stride *= resolution[a];
  for (std::size_t idx = 0; idx < mass.size(); ++idx) {
    out[(idx / stride) % resolution[axis]] += mass[idx];
  }
  return out;
}

double GridDensity::marginal_cdf(std::size_t axis, double x) const {
  const auto masses = marginal_masses(axis);
  const double rel = (x - domain.origin()[axis]) / cell_width(axis);
  if (rel <= 0.0) return 0.0;
  if (rel >= static_cast<double>(masses.size())) return 1.0;
  const auto cell = static_cast<std::size_t>(rel);
  double acc = 0.0;
  for (std::size_t i = 0; i < cell; ++i) acc += masses[i];
  return std::min(1.0, acc + (rel - static_cast<double>(cell)) * masses[cell]);
}

void GridDensity::write_csv(std::ostream& out) const {
  for (std::size_t a = 0; a < resolution.size(); ++a) out << "x" << a + 1 << ',';
  out << "density\n";
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const Vector c = cell_center(i);
    for (Eigen::Index a = 0; a < c.size(); ++a) out << nlohmann::json(c[a]).dump() << ',';
    out << nlohmann::json(density(i)).dump() << '\n';
  }
}

}  // namespace psgd
