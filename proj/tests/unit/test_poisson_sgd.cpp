#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "psgd/metrics.hpp"
#include "psgd/poisson_sgd.hpp"

using namespace psgd;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

class FlatObjective final : public Objective {
 public:
  explicit FlatObjective(const TorusDomain& d) : Objective(d, 1.0) {}
  std::string name() const override { return "flat"; }
  std::size_t num_samples() const override { return 1; }
  double loss(std::size_t, const VectorRef&) const override { return 0.0; }
  void accumulate_gradient(std::size_t, const VectorRef&, Vector&) const override {}
  nlohmann::json spec() const override { return {}; }
};

PoissonSgdConfig base_config(const Vector& x0, const Vector& v0) {
  PoissonSgdConfig c;
  c.beta = 1.0;
  c.epsilon = 0.5;
  c.steps = 10;
  c.initial_point = x0;
  c.initial_velocity = v0;
  c.seed = 7;
  return c;
}

std::string serialize(const RunRecord& r) {
  std::ostringstream os;
  r.write_ndjson(os);
  return os.str();
}

}  // namespace

TEST_CASE("reflect examples") {
  CHECK(reflect(vec({1, 0}), vec({2, 0})).isApprox(vec({-1, 0})));
  CHECK(reflect(vec({1, 0}), vec({0, 3})).isApprox(vec({1, 0})));
  CHECK(reflect(vec({0.6, 0.8}), vec({1, 0})).isApprox(vec({-0.6, 0.8})));
  // Zero gradient: reflection skipped.
  Vector v = vec({0.6, 0.8});
  CHECK_FALSE(reflect_in_place(v, vec({0.0, 1e-13})));
  CHECK(v == vec({0.6, 0.8}));
}

TEST_CASE("reflection algebra on random pairs") {
  RngStream rng(99);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t d = 1 + rng.uniform_index(6);
    const Vector v = uniform_sphere(d, rng);
    Vector g(static_cast<Eigen::Index>(d));
    for (auto& x : g) x = rng.normal() * std::exp(3.0 * rng.normal());
    const Vector rv = reflect(v, g);
    CHECK((reflect(rv, g) - v).norm() < 1e-12);
    CHECK(std::abs(rv.norm() - v.norm()) < 1e-12);
    CHECK(std::abs(rv.dot(g) + v.dot(g)) < 1e-12 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("zero gradient: exponential steps, velocity fixed") {
  const FlatObjective flat(TorusDomain::cube(2, 1000.0));
  auto cfg = base_config(vec({1, 1}), vec({0.6, 0.8}));
  cfg.epsilon = 0.25;
  cfg.steps = 20000;
  const auto rec = run_poisson_sgd(flat, cfg);
  double sum = 0.0;
  for (const auto& s : rec.steps) {
    CHECK(s.velocity == vec({0.6, 0.8}));
    CHECK(s.event == VelocityEvent::kSkipped);
    sum += s.eta;
  }
  const double mean = sum / static_cast<double>(rec.steps.size());
  // Exp(4): standard error 0.25 / sqrt(20000).
  CHECK(std::abs(mean - 0.25) < 4.0 * 0.25 / std::sqrt(20000.0));
}

TEST_CASE("1-D quadratic: a positive gradient at the new point flips the velocity") {
  const auto bowl = quadratic_bowl(TorusDomain({100.0}, {-50.0}), {vec({0.0})});
  auto cfg = base_config(vec({1.0}), vec({1.0}));
  OptimizerState state{cfg.initial_point, cfg.initial_velocity, 0, RngStream(cfg.seed)};
  const auto rec = poisson_sgd_step(state, *bowl, cfg);
  CHECK(rec.theta[0] > 1.0);
  CHECK(rec.velocity[0] == doctest::Approx(-1.0));
  CHECK(state.step == 1);

  auto far = base_config(vec({-40.0}), vec({1.0}));
  OptimizerState s2{far.initial_point, far.initial_velocity, 0, RngStream(3)};
  poisson_sgd_step(s2, *bowl, far);
  // Gradient theta < 0 at the new point; 1-D reflection still flips.
  CHECK(s2.velocity[0] == doctest::Approx(-1.0));
}

TEST_CASE("runs replay exactly and K = 0 is a no-op") {
  const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  auto cfg = base_config(vec({-3.1, 0.2}), vec({1.0, 0.0}));
  cfg.beta = 0.05;
  cfg.epsilon = 0.05;
  cfg.steps = 3;
  const auto a = run_poisson_sgd(*dw, cfg);
  const auto b = run_poisson_sgd(*dw, cfg);
  CHECK(a.steps.size() == 3);
  CHECK(serialize(a) == serialize(b));

  std::istringstream in(serialize(a));
  const auto back = RunRecord::read_ndjson(in);
  REQUIRE(back.has_value());
  CHECK(serialize(*back) == serialize(a));

  cfg.steps = 0;
  const auto empty = run_poisson_sgd(*dw, cfg);
  CHECK(empty.steps.empty());
  CHECK(empty.final_theta == cfg.initial_point);
  CHECK(empty.final_velocity == cfg.initial_velocity);
}

TEST_CASE("full batch uses every sample; mini-batches have m distinct indices") {
  const auto obj = linreg_synthetic(TorusDomain::cube(2, 8.0, -4.0), 12, 2, 0.3, 1);
  auto cfg = base_config(vec({0.1, -0.2}), vec({1.0, 0.0}));
  cfg.steps = 50;
  cfg.batch_size = 0;
  for (const auto& s : run_poisson_sgd(*obj, cfg).steps) CHECK(s.batch.size() == 12);
  cfg.batch_size = 4;
  for (const auto& s : run_poisson_sgd(*obj, cfg).steps) {
    CHECK(s.batch.size() == 4);
    CHECK(std::set<std::size_t>(s.batch.begin(), s.batch.end()).size() == 4);
  }
}

TEST_CASE("velocity stays on the unit sphere") {
  const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  auto cfg = base_config(vec({-3.1, 0.2}), vec({1.0, 0.0}));
  cfg.beta = 0.05;
  cfg.epsilon = 0.05;
  cfg.steps = 20000;
  PoissonSgd psgd(*dw, cfg);
  auto state = psgd.initial_state();
  for (std::size_t k = 0; k < cfg.steps; ++k) {
    psgd.advance(state);
    REQUIRE(std::abs(state.velocity.norm() - 1.0) < 1e-9);
    REQUIRE(dw->domain().contains(state.theta));
  }
}

TEST_CASE("mean learning rate is at most epsilon") {
  std::vector<std::unique_ptr<Objective>> objs;
  objs.push_back(double_well_2d(TorusDomain::cube(2, 40.0, -17.0)));
  objs.push_back(double_well_1d(TorusDomain({16.0}, {-6.0})));
  objs.push_back(quadratic_bowl(TorusDomain({10.0}, {-5.0}), {vec({0.0})}));
  objs.push_back(linreg_synthetic(TorusDomain::cube(2, 8.0, -4.0), 32, 2, 0.5, 3));
  for (const auto& obj : objs) {
    CAPTURE(obj->name());
    PoissonSgdConfig cfg;
    cfg.beta = 0.1;
    cfg.epsilon = 0.2;
    cfg.steps = 100000;
    cfg.batch_size = obj->num_samples() > 1 ? 4 : 0;
    cfg.initial_point = Vector::Zero(static_cast<Eigen::Index>(obj->dim()));
    cfg.initial_velocity = Vector::Zero(static_cast<Eigen::Index>(obj->dim()));
    cfg.initial_velocity[0] = 1.0;
    cfg.seed = 11;
    PoissonSgd psgd(*obj, cfg);
    auto state = psgd.initial_state();
    std::vector<double> etas(cfg.steps);
    for (auto& eta : etas) eta = psgd.step(state).eta;
    const auto est = mean_with_se(etas);
    CHECK(est.mean <= cfg.epsilon + 3.0 * est.standard_error);
  }
}

TEST_CASE("config validation") {
  const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  auto cfg = base_config(vec({-3.1, 0.2}), vec({1.0, 0.0}));
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(PoissonSgd(*dw, cfg), std::invalid_argument);
  cfg = base_config(vec({-3.1, 0.2}), vec({1.0, 1.0}));
  CHECK_THROWS_AS(PoissonSgd(*dw, cfg), std::invalid_argument);
  cfg = base_config(vec({-30.0, 0.2}), vec({1.0, 0.0}));
  CHECK_THROWS_AS(PoissonSgd(*dw, cfg), std::invalid_argument);
  cfg = base_config(vec({-3.1, 0.2}), vec({1.0, 0.0}));
  cfg.batch_size = 2;
  CHECK_THROWS_AS(PoissonSgd(*dw, cfg), std::invalid_argument);

  auto j = base_config(vec({-3.1, 0.2}), vec({1.0, 0.0})).to_json();
  CHECK(PoissonSgdConfig::from_json(j).c_p() == doctest::Approx(2.0));
  j["c_p"] = 5.0;
  CHECK_THROWS_AS(PoissonSgdConfig::from_json(j), std::invalid_argument);
}
