#ifndef PSGD_POISSON_SGD_HPP
#define PSGD_POISSON_SGD_HPP

#include <nlohmann/json.hpp>

#include <cstdint>

#include "psgd/objective.hpp"
#include "psgd/rng.hpp"
#include "psgd/run_record.hpp"
#include "psgd/sampler.hpp"
#include "psgd/types.hpp"

namespace psgd {

/// Gradients shorter than this are treated as zero; reflection is skipped.
inline constexpr double kZeroGradientNorm = 1e-12;

/// Householder reflection of v about the hyperplane normal to g:
/// v - 2 (<g, v> / ||g||^2) g. Leaves v unchanged when ||g|| < kZeroGradientNorm.
Vector reflect(const VectorRef& v, const VectorRef& g);
/// In-place form; returns false when the reflection was skipped.
bool reflect_in_place(Vector& v, const VectorRef& g);

/// Divides v by its norm. A no-op in exact arithmetic for every velocity
/// update used here; applied each step so rounding drift cannot accumulate.
void renormalize(Vector& v);

struct OptimizerState {
  Vector theta;
  Vector velocity;
  std::size_t step = 0;
  RngStream rng{0};
};

struct PoissonSgdConfig {
  double beta = 1.0;
  double epsilon = 1.0;
  std::size_t steps = 0;
  /// 0 means full batch.
  std::size_t batch_size = 0;
  Vector initial_point;
  Vector initial_velocity;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t record_stride = 1;

  /// Constant part of the learning-rate intensity; always 1 / epsilon.
  double c_p() const { return 1.0 / epsilon; }

  void validate(const Objective& obj) const;
  nlohmann::json to_json() const;
  static PoissonSgdConfig from_json(const nlohmann::json& j);
};

/// Poisson SGD iteration with reusable scratch space.
///
/// Per step: draw the mini-batch I_k, draw the learning rate eta_k from the
/// intensity r -> beta <grad L_k(theta + r v), v>_+ + 1/epsilon along the
/// current ray, move to wrap(theta + eta_k v), then reflect v about the
/// mini-batch gradient at the new point. One batch serves both gradient uses.
class PoissonSgd {
 public:
  PoissonSgd(const Objective& obj, PoissonSgdConfig cfg);
  PoissonSgd(const PoissonSgd&) = delete;
  PoissonSgd& operator=(const PoissonSgd&) = delete;

  const PoissonSgdConfig& config() const { return cfg_; }

  OptimizerState initial_state() const;

  StepRecord step(OptimizerState& state);
  /// Same transition as step() without building a record.
  void advance(OptimizerState& state);

  RunRecord run();
  /// Runs all configured steps and returns only the final state.
  OptimizerState run_final();

 private:
  double transition(OptimizerState& state);

  const Objective& obj_;
  PoissonSgdConfig cfg_;
  std::size_t batch_size_;
  MiniBatch batch_;
  RayRate<BatchGradient> rate_;
  Vector grad_;
};

StepRecord poisson_sgd_step(OptimizerState& state, const Objective& obj, const PoissonSgdConfig& cfg);
RunRecord run_poisson_sgd(const Objective& obj, const PoissonSgdConfig& cfg);

}  // namespace psgd

#endif
