#ifndef PSGD_BASELINES_HPP
#define PSGD_BASELINES_HPP

#include <nlohmann/json.hpp>

#include <cstdint>

#include "psgd/objective.hpp"
#include "psgd/poisson_sgd.hpp"
#include "psgd/run_record.hpp"

namespace psgd {

/// Fixed-step SGD, optionally with an isotropic Gaussian perturbation (SGLD):
///
///   theta <- wrap(theta - lr * grad L_k(theta) + noise_std * xi),  xi ~ N(0, I).
///
/// With noise_std = 0 no normals are drawn, so the run is identical to plain SGD.
struct SgdConfig {
  double learning_rate = 1e-3;
  double noise_std = 0.0;
  std::size_t steps = 0;
  /// 0 means full batch.
  std::size_t batch_size = 0;
  Vector initial_point;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t record_stride = 1;

  void validate(const Objective& obj) const;
  nlohmann::json to_json() const;
  static SgdConfig from_json(const nlohmann::json& j);
};

/// Langevin noise level sqrt(2 lr / beta) for inverse temperature beta.
double sgld_noise_std(double learning_rate, double beta);

class GradientDescent {
 public:
  GradientDescent(const Objective& obj, SgdConfig cfg);

  const SgdConfig& config() const { return cfg_; }
  OptimizerState initial_state() const;
  StepRecord step(OptimizerState& state);
  void advance(OptimizerState& state);
  RunRecord run();
  OptimizerState run_final();

 private:
  const Objective& obj_;
  SgdConfig cfg_;
  std::size_t batch_size_;
  MiniBatch batch_;
  Vector grad_;
};

RunRecord run_sgd(const Objective& obj, const SgdConfig& cfg);

}  // namespace psgd

#endif
