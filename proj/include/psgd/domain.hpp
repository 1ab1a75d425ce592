#ifndef PSGD_DOMAIN_HPP
#define PSGD_DOMAIN_HPP

#include <nlohmann/json.hpp>

#include <cstddef>
#include <vector>

#include "psgd/types.hpp"

namespace psgd {

class RngStream;

/// Flat torus: the box [origin_i, origin_i + side_i) with opposite faces identified.
///
/// The origin defaults to zero. Objectives whose natural minima sit at negative
/// coordinates (the double well) are placed on boxes with a negative origin.
class TorusDomain {
 public:
  TorusDomain(std::vector<double> side_lengths, std::vector<double> origin = {});

  static TorusDomain cube(std::size_t dim, double side, double origin = 0.0);

  std::size_t dim() const { return sides_.size(); }
  const std::vector<double>& side_lengths() const { return sides_; }
  const std::vector<double>& origin() const { return origin_; }

  /// Largest geodesic distance on the torus: half the norm of the side vector.
  double diameter() const;
  double volume() const;

  bool contains(const VectorRef& p) const;

  Vector wrap(const VectorRef& raw) const;
  void wrap_in_place(Vector& p) const;

  /// Euclidean norm of the per-coordinate minimal signed differences.
  double distance(const VectorRef& a, const VectorRef& b) const;

  Vector sample_uniform(RngStream& rng) const;

  nlohmann::json to_json() const;
  static TorusDomain from_json(const nlohmann::json& j);

  bool operator==(const TorusDomain&) const = default;

 private:
  std::vector<double> sides_;
  std::vector<double> origin_;
};

}  // namespace psgd

#endif
