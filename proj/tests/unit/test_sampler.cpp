#include "doctest.h"

#include <cmath>
#include <vector>

#include "psgd/metrics.hpp"
#include "psgd/objective.hpp"
#include "psgd/sampler.hpp"

using namespace psgd;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

struct ConstantField {
  Vector g;
  void operator()(const VectorRef&, Vector& out) const { out = g; }
};

// Gradient min(x, cap) on a 1-D ray from 0 with v = +1: rate = beta * min(r, cap) + C.
struct CappedLinearField {
  double cap;
  void operator()(const VectorRef& p, Vector& out) const {
    out.resize(1);
    out[0] = std::min(p[0], cap);
  }
};

template <class Rate>
std::vector<double> draw_thinning(const Rate& rate, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_ray_exponential(rate, rng);
  return out;
}

template <class Rate>
std::vector<double> draw_oracle(const Rate& rate, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_ray_exponential_oracle(rate, rng, 1e-9);
  return out;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("rng streams are deterministic and splittable") {
  RngStream a(123);
  RngStream b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.draws() == 100);
  RngStream c1 = RngStream(5).split(1);
  RngStream c2 = RngStream(5).split(2);
  CHECK(c1.next_u64() != c2.next_u64());
  CHECK(RngStream(5).split(1).next_u64() == RngStream(5).split(1).next_u64());
  // seed_seq and mt19937_64 are fully specified by the standard.
  CHECK(RngStream(0).next_u64() == 0x2ed18c9394d872a1ULL);
}

TEST_CASE("uniform_sphere") {
  RngStream rng(1);
  constexpr int kDraws = 100000;
  int plus = 0;
  for (int i = 0; i < kDraws; ++i) {
    const Vector v = uniform_sphere(1, rng);
    REQUIRE(std::abs(std::abs(v[0]) - 1.0) < 1e-12);
    plus += v[0] > 0 ? 1 : 0;
  }
  CHECK(std::abs(plus / double(kDraws) - 0.5) < 0.01);

  Vector sum = Vector::Zero(3);
  for (int i = 0; i < kDraws; ++i) {
    const Vector v = uniform_sphere(3, rng);
    REQUIRE(std::abs(v.norm() - 1.0) < 1e-12);
    sum += v;
  }
  CHECK((sum / kDraws).cwiseAbs().maxCoeff() < 0.01);
  for (std::size_t d : {2u, 7u, 50u}) CHECK(std::abs(uniform_sphere(d, rng).norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(uniform_sphere(0, rng), std::invalid_argument);
}

TEST_CASE("thinning reproduces constant-rate exponential laws") {
  const TorusDomain line = TorusDomain::cube(1, 100.0);
  const Vector base = vec({0.0});
  const Vector dir = vec({1.0});

  RayRate zero(line, base, dir, 1.0, 10.0, 1.0, ConstantField{vec({0.0})});
  const auto z = draw_thinning(zero, 100000, 1);
  CHECK(std::abs(mean(z) - 0.1) < 0.002);
  CHECK(ks_statistic(z, [](double t) { return 1.0 - std::exp(-10.0 * t); }) < 0.006);

  RayRate constant(line, base, dir, 3.0, 1.0, 2.0, ConstantField{vec({2.0})});
  const auto c = draw_thinning(constant, 100000, 2);
  CHECK(std::abs(mean(c) - 1.0 / 7.0) < 0.003);
  CHECK(ks_statistic(c, [](double t) { return 1.0 - std::exp(-7.0 * t); }) < 0.006);

  RayRate clipped(line, base, dir, 1.0, 4.0, 5.0, ConstantField{vec({-5.0})});
  const auto n = draw_thinning(clipped, 100000, 3);
  CHECK(std::abs(mean(n) - 0.25) < 0.005);
  CHECK(ks_statistic(n, [](double t) { return 1.0 - std::exp(-4.0 * t); }) < 0.006);
}

TEST_CASE("rate bound violations abort") {
  const TorusDomain line = TorusDomain::cube(1, 100.0);
  // Declared bound 1 but the field has norm 2.
  RayRate lying(line, vec({0.0}), vec({1.0}), 1.0, 1.0, 1.0, ConstantField{vec({2.0})});
  RngStream rng(0);
  CHECK_THROWS_AS(sample_ray_exponential(lying, rng), GradientBoundViolation);
  CHECK_THROWS_AS(RayRate(line, vec({0.0}), vec({2.0}), 1.0, 1.0, 1.0, ConstantField{vec({0.0})}),
                  std::invalid_argument);
  CHECK_THROWS_AS(RayRate(line, 1.0, 0.0, 1.0, ConstantField{vec({0.0})}), std::invalid_argument);
}

TEST_CASE("inverse-CDF oracle on closed forms") {
  const auto constant = [](double) { return 3.0; };
  for (double u : {0.1, 0.5, 0.9, 0.999}) {
    CHECK(invert_integrated_rate(constant, u, 3.0, 3.0, 1e-10) ==
          doctest::Approx(-std::log1p(-u) / 3.0).epsilon(1e-9));
  }
  CHECK(invert_integrated_rate(constant, 0.0, 3.0, 3.0, 1e-10) == 0.0);
  // rate 1 + t: Lambda(t) = t + t^2/2.
  const auto linear = [](double t) { return 1.0 + t; };
  for (double u : {0.2, 0.7, 0.95}) {
    const double e = -std::log1p(-u);
    CHECK(invert_integrated_rate(linear, u, 1.0, 1e9, 1e-10) ==
          doctest::Approx(-1.0 + std::sqrt(1.0 + 2.0 * e)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(invert_integrated_rate(constant, 1.0, 3.0, 3.0, 1e-10), std::invalid_argument);
}

TEST_CASE("thinning agrees with the inverse-CDF oracle on five rate fields") {
  constexpr std::size_t kDraws = 100000;
  const TorusDomain line = TorusDomain::cube(1, 1000.0);
  const Vector base = vec({0.0});
  const Vector dir = vec({1.0});

  auto compare = [&](const auto& rate, std::uint64_t seed) {
    const auto thin = draw_thinning(rate, kDraws, seed);
    const auto oracle = draw_oracle(rate, kDraws, seed + 1000);
    const double w1 = wasserstein1_1d(thin, oracle);
    CAPTURE(mean(thin));
    CAPTURE(mean(oracle));
    CHECK(w1 < 1e-2);
  };

  SUBCASE("zero") { compare(RayRate(line, base, dir, 1.0, 10.0, 1.0, ConstantField{vec({0.0})}), 1); }
  SUBCASE("constant") { compare(RayRate(line, base, dir, 3.0, 1.0, 2.0, ConstantField{vec({2.0})}), 2); }
  SUBCASE("clipped") { compare(RayRate(line, base, dir, 1.0, 4.0, 5.0, ConstantField{vec({-5.0})}), 3); }
  SUBCASE("linear in r") { compare(RayRate(line, base, dir, 1.0, 1.0, 5.0, CappedLinearField{5.0}), 4); }
  SUBCASE("double-well ray") {
    const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
    const MiniBatch batch = full_batch(1);
    RayRate rate(dw->domain(), vec({-3.0, 0.5}), vec({1.0, 0.0}), 0.05, 20.0, dw->grad_norm_bound(),
                 BatchGradient(*dw, batch));
    compare(rate, 5);
  }
}
