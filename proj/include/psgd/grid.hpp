#ifndef PSGD_GRID_HPP
#define PSGD_GRID_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "psgd/domain.hpp"
#include "psgd/types.hpp"

namespace psgd {

/// Regular cell grid over a torus box with one probability mass per cell.
/// Cells are stored with the first axis varying fastest.
struct GridDensity {
  TorusDomain domain;
  std::vector<std::size_t> resolution;
  std::vector<double> mass;
  /// Integral of the unnormalized density over the box.
  double normalization = 0.0;
  /// Largest unnormalized value seen at any quadrature node.
  double max_unnormalized = 0.0;

  GridDensity(TorusDomain d, std::vector<std::size_t> res);

  std::size_t num_cells() const { return mass.size(); }
  double cell_volume() const;
  double cell_width(std::size_t axis) const;
  std::size_t cell_index(const VectorRef& p) const;
  Vector cell_center(std::size_t index) const;
  /// Normalized density value in a cell.
  double density(std::size_t index) const { return mass[index] / cell_volume(); }

  std::vector<double> marginal_masses(std::size_t axis) const;
  /// Marginal CDF along `axis`, linear inside each cell.
  double marginal_cdf(std::size_t axis, double x) const;

  /// Expectation of f over the cell masses (cell-center rule).
  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < num_cells(); ++i) acc += mass[i] * f(cell_center(i));
    return acc;
  }

  /// One row per cell: center coordinates, density.
  void write_csv(std::ostream& out) const;
};

}  // namespace psgd

#endif
