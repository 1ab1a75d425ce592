#ifndef PSGD_BPS_HPP
#define PSGD_BPS_HPP

#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

#include "psgd/objective.hpp"
#include "psgd/poisson_sgd.hpp"
#include "psgd/run_record.hpp"
#include "psgd/sampler.hpp"

namespace psgd {

struct BpsConfig {
  double beta = 1.0;
  double lambda_ref = 1.0;
  double c_b = 0.0;
  /// Only meaningful in coupled mode, where lambda_ref + c_b = beta M + 1/epsilon.
  double epsilon = 1.0;
  bool coupled = false;
  std::size_t steps = 0;
  Vector initial_point;
  Vector initial_velocity;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t record_stride = 1;

  /// Coupled configuration: lambda_ref = beta M + 1/epsilon - c_b.
  static BpsConfig coupled_with(const Objective& obj, double beta, double epsilon, double c_b = 0.0);

  double event_floor() const { return lambda_ref + c_b; }

  void validate(const Objective& obj) const;
  nlohmann::json to_json() const;
  static BpsConfig from_json(const nlohmann::json& j);
};

/// Probability of a reflection (rather than a refreshment) at an event where
/// the directional derivative of the full risk along the incoming velocity is `slope`.
double reflection_probability(double beta, double slope, double lambda_ref, double c_b);

/// Discrete bouncy particle sampler: full-batch event-time chain with
/// reflection/refreshment choice at each event.
class BouncyParticleSampler {
 public:
  BouncyParticleSampler(const Objective& obj, BpsConfig cfg);
  BouncyParticleSampler(const BouncyParticleSampler&) = delete;
  BouncyParticleSampler& operator=(const BouncyParticleSampler&) = delete;

  const BpsConfig& config() const { return cfg_; }

  OptimizerState initial_state() const;
  StepRecord step(OptimizerState& state);
  VelocityEvent advance(OptimizerState& state);
  RunRecord run();
  OptimizerState run_final();

  /// Reflection probability used by the most recent transition.
  double last_reflection_probability() const { return last_p_; }

 private:
  double move(OptimizerState& state);
  VelocityEvent update_velocity(OptimizerState& state);

  const Objective& obj_;
  BpsConfig cfg_;
  MiniBatch batch_;
  RayRate<BatchGradient> rate_;
  Vector grad_;
  double last_p_ = 0.0;
};

StepRecord bps_step(OptimizerState& state, const Objective& obj, const BpsConfig& cfg);
RunRecord run_bps(const Objective& obj, const BpsConfig& cfg);

struct CoupledCompareOptions {
  /// Split of the shared event floor; lambda_ref = beta M + 1/epsilon - c_b.
  double c_b = 0.0;
  Vector initial_point;
  Vector initial_velocity;
  std::uint64_t seed = 0;
  std::size_t n_projections = 256;
  /// Poisson SGD batch size, 0 for full batch.
  std::size_t batch_size = 0;
};

struct CoupledCompareResult {
  double sliced_w1 = 0.0;
  std::vector<Vector> poisson_sgd_endpoints;
  std::vector<Vector> bps_endpoints;
};

/// Runs `trials` independent seeded pairs (Poisson SGD with C_P = 1/epsilon,
/// coupled BPS, same initial value) for K steps and measures the sliced W1
/// distance between the two endpoint clouds.
CoupledCompareResult coupled_compare(const Objective& obj, double beta, double epsilon,
                                     std::size_t steps, std::size_t trials,
                                     const CoupledCompareOptions& options);

}  // namespace psgd

#endif
