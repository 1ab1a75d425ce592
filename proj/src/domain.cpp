#include "psgd/domain.hpp"

#include <cmath>
#include <stdexcept>

#include "psgd/rng.hpp"

namespace psgd {

TorusDomain::TorusDomain(std::vector<double> side_lengths, std::vector<double> origin)
    : sides_(std::move(side_lengths)), origin_(std::move(origin)) {
  if (sides_.empty()) throw std::invalid_argument("torus dimension must be at least 1");
  for (double s : sides_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("torus side lengths must be positive and finite");
    }
  }
  if (origin_.empty()) origin_.assign(sides_.size(), 0.0);
  if (origin_.size() != sides_.size()) throw DimensionMismatch(sides_.size(), origin_.size());
  for (double o : origin_) {
    if (!std::isfinite(o)) throw std::invalid_argument("torus origin must be finite");
  }
}

TorusDomain TorusDomain::cube(std::size_t dim, double side, double origin) {
  return TorusDomain(std::vector<double>(dim, side), std::vector<double>(dim, origin));
}

double TorusDomain::diameter() const {
  double sq = 0.0;
  for (double s : sides_) sq += s * s;
  return 0.5 * std::sqrt(sq);
}

double TorusDomain::volume() const {
  double v = 1.0;
  for (double s : sides_) v *= s;
  return v;
}

bool TorusDomain::contains(const VectorRef& p) const {
  if (static_cast<std::size_t>(p.size()) != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double x = p[static_cast<Eigen::Index>(i)];
    if (!(x >= origin_[i] && x < origin_[i] + sides_[i])) return false;
  }
  return true;
}

Vector TorusDomain::wrap(const VectorRef& raw) const {
  Vector p = raw;
  wrap_in_place(p);
  return p;
}

void TorusDomain::wrap_in_place(Vector& p) const {
  require_dim(dim(), p.size());
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double s = sides_[i];
    const double lo = origin_[i];
    double x = p[idx];
    if (x >= lo && x < lo + s) continue;
    x = lo + (x - lo - s * std::floor((x - lo) / s));
    // floor() can land exactly on the upper face after rounding.
    if (x >= lo + s || x < lo) x = lo;
    p[idx] = x;
  }
}

double TorusDomain::distance(const VectorRef& a, const VectorRef& b) const {
  require_dim(dim(), a.size());
  require_dim(dim(), b.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double s = sides_[i];
    double diff = std::fmod(std::abs(a[idx] - b[idx]), s);
    diff = std::min(diff, s - diff);
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

Vector TorusDomain::sample_uniform(RngStream& rng) const {
  Vector p(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) {
    p[static_cast<Eigen::Index>(i)] = origin_[i] + sides_[i] * rng.uniform();
  }
  wrap_in_place(p);
  return p;
}

nlohmann::json TorusDomain::to_json() const {
  return {{"dim", dim()}, {"side_lengths", sides_}, {"origin", origin_}};
}

TorusDomain TorusDomain::from_json(const nlohmann::json& j) {
  const auto dim = j.at("dim").get<std::size_t>();
  std::vector<double> sides;
  const auto& sj = j.at("side_lengths");
  if (sj.is_number()) {
    sides.assign(dim, sj.get<double>());
  } else {
    sides = sj.get<std::vector<double>>();
  }
  if (sides.size() != dim) throw DimensionMismatch(dim, sides.size());
  std::vector<double> origin;
  if (j.contains("origin")) {
    const auto& oj = j.at("origin");
    origin = oj.is_number() ? std::vector<double>(dim, oj.get<double>())
                            : oj.get<std::vector<double>>();
  }
  return TorusDomain(std::move(sides), std::move(origin));
}

}  // namespace psgd
