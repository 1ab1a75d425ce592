#include "doctest.h"

#include <cmath>

#include "psgd/domain.hpp"
#include "psgd/rng.hpp"

using psgd::TorusDomain;
using psgd::Vector;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("wrap reduces each coordinate into its side") {
  const auto d2 = TorusDomain::cube(2, 10.0);
  CHECK(d2.wrap(vec({3.5, 4.0})).isApprox(vec({3.5, 4.0})));
  const Vector w = d2.wrap(vec({12.5, -1.0}));
  CHECK(w[0] == doctest::Approx(2.5));
  CHECK(w[1] == doctest::Approx(9.0));
  const auto d1 = TorusDomain::cube(1, 10.0);
  CHECK(d1.wrap(vec({-23.0}))[0] == doctest::Approx(7.0));
}

TEST_CASE("wrap honours a shifted origin") {
  const TorusDomain d({10.0}, {-5.0});
  CHECK(d.wrap(vec({5.0}))[0] == doctest::Approx(-5.0));
  CHECK(d.wrap(vec({-7.5}))[0] == doctest::Approx(2.5));
  CHECK(d.contains(vec({-5.0})));
  CHECK_FALSE(d.contains(vec({5.0})));
}

TEST_CASE("torus distance examples") {
  const auto d2 = TorusDomain::cube(2, 10.0);
  CHECK(d2.distance(vec({1, 1}), vec({1, 1})) == 0.0);
  CHECK(TorusDomain::cube(1, 10.0).distance(vec({1}), vec({9})) == doctest::Approx(2.0));
  CHECK(d2.distance(vec({0, 0}), vec({5, 5})) == doctest::Approx(std::sqrt(50.0)));
  CHECK(d2.diameter() == doctest::Approx(std::sqrt(50.0)));
}

TEST_CASE("dimension mismatch is an error") {
  const auto d2 = TorusDomain::cube(2, 10.0);
  CHECK_THROWS_AS(d2.wrap(vec({1.0})), psgd::DimensionMismatch);
  CHECK_THROWS_AS(d2.distance(vec({1.0}), vec({1.0, 2.0})), psgd::DimensionMismatch);
  CHECK_THROWS_AS(TorusDomain({}), std::invalid_argument);
  CHECK_THROWS_AS(TorusDomain({1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("wrap is idempotent and lands in the box; distance is a bounded metric") {
  psgd::RngStream rng(11);
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    std::vector<double> sides(dim);
    std::vector<double> origin(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      sides[i] = 1.0 + 9.0 * rng.uniform();
      origin[i] = -5.0 + 10.0 * rng.uniform();
    }
    const TorusDomain d(sides, origin);
    auto raw = [&] {
      Vector v(static_cast<Eigen::Index>(dim));
      for (auto& x : v) x = -1e3 + 2e3 * rng.uniform();
      return v;
    };
    for (int t = 0; t < 1000; ++t) {
      const Vector a = d.wrap(raw());
      const Vector b = d.wrap(raw());
      const Vector c = d.wrap(raw());
      REQUIRE(d.contains(a));
      CHECK(d.wrap(a) == a);
      const double ab = d.distance(a, b);
      CHECK(ab <= d.diameter() + 1e-12);
      CHECK(ab == doctest::Approx(d.distance(b, a)));
      CHECK(d.distance(a, c) <= ab + d.distance(b, c) + 1e-12);
    }
  }
}

TEST_CASE("json round trip") {
  const TorusDomain d({4.0, 8.0}, {-1.0, 2.0});
  CHECK(TorusDomain::from_json(d.to_json()) == d);
  const auto j = nlohmann::json::parse(R"({"dim": 3, "side_lengths": 40})");
  const auto cube = TorusDomain::from_json(j);
  CHECK(cube.dim() == 3);
  CHECK(cube.volume() == doctest::Approx(64000.0));
}
