#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "psgd/objective.hpp"
#include "psgd/rng.hpp"

using namespace psgd;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// l(z; theta) = <c, theta> + 7, single sample.
class LinearLoss final : public Objective {
 public:
  LinearLoss(const TorusDomain& d, Vector c) : Objective(d, c.norm() + 1.0), c_(std::move(c)) {}
  std::string name() const override { return "linear"; }
  std::size_t num_samples() const override { return 1; }
  double loss(std::size_t, const VectorRef& t) const override { return c_.dot(t) + 7.0; }
  void accumulate_gradient(std::size_t, const VectorRef&, Vector& g) const override { g += c_; }
  nlohmann::json spec() const override { return {}; }

 private:
  Vector c_;
};

std::unique_ptr<Objective> two_point_bowl() {
  return quadratic_bowl(TorusDomain({10.0, 10.0}, {-5.0, -5.0}), {vec({0, 0}), vec({2, 0})});
}

}  // namespace

TEST_CASE("empirical risk examples") {
  const auto bowl = two_point_bowl();
  CHECK(empirical_risk(*bowl, vec({1, 0})) == doctest::Approx(0.5));

  const auto single = quadratic_bowl(TorusDomain::cube(2, 10.0, -5.0), {vec({1, 2})});
  const Vector t = vec({0.3, -0.7});
  CHECK(empirical_risk(*single, t) == single->loss(0, t));

  const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  CHECK(empirical_risk(*dw, vec({6, 0})) == doctest::Approx(0.0));
  CHECK(empirical_risk(*dw, vec({-3, 0})) == doctest::Approx(729.0));
  CHECK(empirical_risk(*dw, vec({0, 0})) == doctest::Approx(864.0));
}

TEST_CASE("mini-batch gradient examples") {
  const auto bowl = two_point_bowl();
  const Vector theta = vec({1, 0});
  CHECK(minibatch_risk_grad(*bowl, MiniBatch{{0}}, theta).isApprox(vec({1, 0})));
  CHECK(minibatch_risk_grad(*bowl, MiniBatch{{1}}, theta).isApprox(vec({-1, 0})));
  Vector full;
  full_gradient(*bowl, theta, full);
  CHECK(minibatch_risk_grad(*bowl, full_batch(2), theta) == full);
  CHECK_THROWS_AS(minibatch_risk_grad(*bowl, MiniBatch{{2}}, theta), std::out_of_range);
}

TEST_CASE("mini-batch gradients average to the full gradient over all subsets") {
  RngStream rng(3);
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<Vector> centers;
    for (std::size_t i = 0; i < n; ++i) centers.push_back(vec({rng.normal(), rng.normal()}));
    const auto bowl = quadratic_bowl(TorusDomain::cube(2, 20.0, -10.0), centers);
    const Vector theta = vec({0.4, -1.3});
    Vector full;
    full_gradient(*bowl, theta, full);
    for (std::size_t m = 1; m <= n; ++m) {
      Vector acc = Vector::Zero(2);
      std::size_t count = 0;
      std::vector<bool> pick(n, false);
      std::fill(pick.begin(), pick.begin() + static_cast<long>(m), true);
      do {
        MiniBatch b;
        for (std::size_t i = 0; i < n; ++i) {
          if (pick[i]) b.indices.push_back(i);
        }
        acc += minibatch_risk_grad(*bowl, b, theta);
        ++count;
      } while (std::prev_permutation(pick.begin(), pick.end()));
      CHECK((acc / static_cast<double>(count) - full).norm() < 1e-12);
    }
  }
}

TEST_CASE("sample_minibatch draws uniform subsets without replacement") {
  RngStream rng(17);
  const auto full = sample_minibatch(5, 5, rng);
  CHECK(std::set<std::size_t>(full.indices.begin(), full.indices.end()).size() == 5);

  constexpr int kDraws = 100000;
  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += sample_minibatch(2, 1, rng).indices[0] == 0 ? 1 : 0;
  CHECK(std::abs(ones / double(kDraws) - 0.5) < 0.01);

  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  for (int i = 0; i < kDraws; ++i) {
    auto b = sample_minibatch(4, 2, rng).indices;
    REQUIRE(b[0] != b[1]);
    std::sort(b.begin(), b.end());
    ++counts[{b[0], b[1]}];
  }
  CHECK(counts.size() == 6);
  for (const auto& [subset, c] : counts) CHECK(std::abs(c / double(kDraws) - 1.0 / 6.0) < 0.01);

  CHECK_THROWS_AS(sample_minibatch(3, 4, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_minibatch(3, 0, rng), std::invalid_argument);
}

TEST_CASE("check_gradient on the built-in objectives") {
  RngStream rng(5);
  std::vector<std::unique_ptr<Objective>> objs;
  objs.push_back(double_well_2d(TorusDomain::cube(2, 40.0, -17.0)));
  objs.push_back(double_well_1d(TorusDomain({16.0}, {-6.0})));
  objs.push_back(two_point_bowl());
  objs.push_back(linreg_synthetic(TorusDomain::cube(3, 8.0, -4.0), 20, 3, 0.5, 9));
  for (const auto& obj : objs) {
    CAPTURE(obj->name());
    for (int i = 0; i < 100; ++i) {
      const Vector theta = obj->domain().sample_uniform(rng);
      CHECK(check_gradient(*obj, theta) < 1e-5);
      Vector g;
      full_gradient(*obj, theta, g);
      CHECK(g.norm() <= obj->grad_norm_bound());
      for (std::size_t s = 0; s < obj->num_samples(); ++s) {
        Vector gs = Vector::Zero(static_cast<Eigen::Index>(obj->dim()));
        obj->accumulate_gradient(s, theta, gs);
        CHECK(gs.norm() <= obj->grad_norm_bound());
        CHECK(obj->loss(s, theta) >= 0.0);
      }
    }
  }

  const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  Vector g;
  full_gradient(*dw, vec({6, 0}), g);
  CHECK(g.norm() < 1e-4);
  full_gradient(*dw, vec({-3, 0}), g);
  CHECK(g.norm() < 1e-4);

  const LinearLoss lin(TorusDomain::cube(2, 10.0), vec({0.5, -2.0}));
  CHECK(check_gradient(lin, vec({3.0, 4.0})) < 1e-9);
}

TEST_CASE("double-well gradient bound is the sup over the box") {
  const auto dw = double_well_1d(TorusDomain({16.0}, {-6.0}));
  // f'(10) = 4000 - 1200 - 720 dominates f' on [-6, 10].
  CHECK(dw->grad_norm_bound() == doctest::Approx(2080.0));
  const auto dw2 = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  const double fx = 4.0 * 23 * 23 * 23 - 12.0 * 23 * 23 - 72.0 * 23;
  CHECK(dw2->grad_norm_bound() == doctest::Approx(std::hypot(fx, 2.0 * 23.0)));
}

TEST_CASE("gradient bound violations are hard errors") {
  const auto bowl = two_point_bowl();
  Vector big = Vector::Constant(2, 1e6);
  CHECK_THROWS_AS(enforce_gradient_bound(*bowl, big), GradientBoundViolation);
}

TEST_CASE("linreg data persists and replays exactly") {
  const auto data = generate_linreg(16, 2, 0.1, 42);
  const auto back = LinregData::from_json(nlohmann::json::parse(data.to_json().dump()));
  CHECK(back.X == data.X);
  CHECK(back.y == data.y);
  const auto again = generate_linreg(16, 2, 0.1, 42);
  CHECK(again.y == data.y);
  const auto test = generate_linreg(16, 2, 0.1, 42, 1);
  CHECK(test.true_weights == data.true_weights);
  CHECK(test.y != data.y);

  const auto zero_noise = generate_linreg(8, 2, 0.0, 1);
  const auto obj = linreg_objective(TorusDomain::cube(2, 8.0, -4.0), zero_noise);
  const Vector w = Eigen::Map<const Vector>(zero_noise.true_weights.data(), 2);
  if (obj->domain().contains(w)) CHECK(empirical_risk(*obj, w) < 1e-20);
}

TEST_CASE("make_objective builds from a spec") {
  const auto j = nlohmann::json::parse(
      R"({"name": "double_well_2d", "domain": {"dim": 2, "side_lengths": 40, "origin": -17}})");
  const auto obj = make_objective(j);
  CHECK(obj->name() == "double_well_2d");
  const auto rebuilt = make_objective(obj->spec());
  CHECK(rebuilt->grad_norm_bound() == obj->grad_norm_bound());
  CHECK_THROWS(make_objective(nlohmann::json::parse(R"({"name": "nope", "domain": {"dim": 1, "side_lengths": 1}})")));
}
