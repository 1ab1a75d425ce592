#include "doctest.h"

#include <cmath>
#include <sstream>

#include "psgd/baselines.hpp"

using namespace psgd;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("plain SGD is deterministic gradient descent on a full batch") {
  const auto q = quadratic_bowl(TorusDomain({10.0}, {-5.0}), {vec({0.0})});
  SgdConfig c;
  c.learning_rate = 0.5;
  c.steps = 3;
  c.initial_point = vec({4.0});
  const auto r = run_sgd(*q, c);
  CHECK(r.algorithm == "sgd");
  REQUIRE(r.steps.size() == 3);
  CHECK(r.steps[0].theta[0] == doctest::Approx(2.0));
  CHECK(r.steps[1].theta[0] == doctest::Approx(1.0));
  CHECK(r.final_theta[0] == doctest::Approx(0.5));
  CHECK(r.count(VelocityEvent::kSkipped) == 3);
}

TEST_CASE("SGD wraps into the box") {
  const auto q = quadratic_bowl(TorusDomain({10.0}, {-5.0}), {vec({0.0})});
  SgdConfig c;
  c.learning_rate = 3.0;
  c.steps = 1;
  c.initial_point = vec({4.0});
  // 4 - 3 * 4 = -8, wrapped to 2.
  CHECK(run_sgd(*q, c).final_theta[0] == doctest::Approx(2.0));
}

TEST_CASE("SGD converges to the local minimum of the double well") {
  const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  SgdConfig c;
  c.learning_rate = 0.005;
  c.steps = 2000;
  c.initial_point = vec({-3.1, 0.2});
  GradientDescent gd(*dw, c);
  const auto s = gd.run_final();
  CHECK(std::abs(s.theta[0] + 3.0) < 1e-6);
  CHECK(std::abs(s.theta[1]) < 1e-6);
}

TEST_CASE("SGLD noise level and replay") {
  CHECK(sgld_noise_std(0.01, 2.0) == doctest::Approx(0.1));
  CHECK_THROWS(sgld_noise_std(0.01, 0.0));
  const auto dw = double_well_2d(TorusDomain::cube(2, 40.0, -17.0));
  SgdConfig c;
  c.learning_rate = 0.001;
  c.noise_std = sgld_noise_std(0.001, 0.1);
  c.steps = 500;
  c.initial_point = vec({-3.0, 0.0});
  c.seed = 3;
  const auto a = run_sgd(*dw, c);
  const auto b = run_sgd(*dw, c);
  CHECK(a.algorithm == "sgld");
  std::ostringstream sa;
  std::ostringstream sb;
  a.write_ndjson(sa);
  b.write_ndjson(sb);
  CHECK(sa.str() == sb.str());
  CHECK(a.final_theta != c.initial_point);
}

TEST_CASE("mini-batch SGD averages the selected samples") {
  const auto q = quadratic_bowl(TorusDomain({20.0}, {-10.0}), {vec({-1.0}), vec({1.0}), vec({3.0})});
  SgdConfig c;
  c.learning_rate = 1.0;
  c.steps = 1;
  c.batch_size = 1;
  c.initial_point = vec({0.0});
  c.seed = 11;
  const auto r = run_sgd(*q, c);
  REQUIRE(r.steps[0].batch.size() == 1);
  // lr 1 on a single quadratic jumps exactly to its center.
  const double centers[] = {-1.0, 1.0, 3.0};
  CHECK(r.final_theta[0] == doctest::Approx(centers[r.steps[0].batch[0]]));
}

TEST_CASE("SGD config validation and JSON round trip") {
  const auto q = quadratic_bowl(TorusDomain({10.0}, {-5.0}), {vec({0.0})});
  SgdConfig c;
  c.steps = 4;
  c.initial_point = vec({1.0, 2.0});
  CHECK_THROWS(c.validate(*q));
  c.initial_point = vec({1.0});
  c.learning_rate = 0.0;
  CHECK_THROWS(c.validate(*q));
  c.learning_rate = 0.1;
  c.noise_std = -1.0;
  CHECK_THROWS(c.validate(*q));
  c.noise_std = 0.2;
  const auto back = SgdConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}
