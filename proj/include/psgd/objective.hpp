#ifndef PSGD_OBJECTIVE_HPP
#define PSGD_OBJECTIVE_HPP

#include <nlohmann/json.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "psgd/domain.hpp"
#include "psgd/types.hpp"

namespace psgd {

class RngStream;

/// Regularity constants used by the convergence and generalization bounds.
struct ObjectiveMetadata {
  std::optional<double> lipschitz_c1;
  std::optional<double> grad_at_origin_B;
  std::optional<double> loss_at_origin_A;
};

/// Raised when a gradient exceeds the declared bound M_l. Thinning is only
/// exact under a true bound, so runs must stop.
class GradientBoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Size-m subset of [0, n), indices distinct.
struct MiniBatch {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
};

/// Per-sample loss l(z_i; theta) >= 0 over an immutable dataset, together with a
/// bound M_l on every per-sample gradient norm over the objective's domain.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  std::size_t dim() const { return domain_.dim(); }
  virtual std::size_t num_samples() const = 0;

  virtual double loss(std::size_t i, const VectorRef& theta) const = 0;
  /// grad += gradient of the i-th loss at theta.
  virtual void accumulate_gradient(std::size_t i, const VectorRef& theta, Vector& grad) const = 0;

  const TorusDomain& domain() const { return domain_; }
  double grad_norm_bound() const { return grad_norm_bound_; }
  const ObjectiveMetadata& metadata() const { return metadata_; }

  /// Constructor arguments; enough to rebuild the objective with make_objective().
  virtual nlohmann::json spec() const = 0;

 protected:
  Objective(TorusDomain domain, double grad_norm_bound, ObjectiveMetadata metadata = {});

 private:
  TorusDomain domain_;
  double grad_norm_bound_;
  ObjectiveMetadata metadata_;
};

double empirical_risk(const Objective& obj, const VectorRef& theta);
void full_gradient(const Objective& obj, const VectorRef& theta, Vector& grad);

double minibatch_risk(const Objective& obj, const MiniBatch& batch, const VectorRef& theta);
void minibatch_risk_grad(const Objective& obj, const MiniBatch& batch, const VectorRef& theta,
                         Vector& grad);
Vector minibatch_risk_grad(const Objective& obj, const MiniBatch& batch, const VectorRef& theta);

/// Uniform size-m subset of [0, n), drawn without replacement.
MiniBatch sample_minibatch(std::size_t n, std::size_t m, RngStream& rng);
MiniBatch full_batch(std::size_t n);

/// Max per-coordinate relative error between central differences of the
/// empirical risk and the analytic full gradient. The denominator is floored
/// at 1 so that near-zero gradients are compared absolutely.
double check_gradient(const Objective& obj, const VectorRef& theta, double h = 1e-6);

/// Throws GradientBoundViolation when ||grad|| exceeds M_l (1e-9 relative slack).
void enforce_gradient_bound(const Objective& obj, const Vector& grad);

/// Mini-batch gradient field with the bound check folded in; the unit in which
/// the optimizers consume an objective.
class BatchGradient {
 public:
  BatchGradient(const Objective& obj, const MiniBatch& batch) : obj_(obj), batch_(batch) {}

  void operator()(const VectorRef& theta, Vector& grad) const {
    minibatch_risk_grad(obj_, batch_, theta, grad);
    enforce_gradient_bound(obj_, grad);
  }

 private:
  const Objective& obj_;
  const MiniBatch& batch_;
};

// ---------------------------------------------------------------------------
// Built-in objectives. Each derives M_l analytically on the domain it is given.

/// f(x, y) = x^4 - 4x^3 - 36x^2 + y^2 + 864. Local minimum (-3, 0) with value
/// 729, global minimum (6, 0) with value 0. Single "sample".
std::unique_ptr<Objective> double_well_2d(const TorusDomain& domain);

/// The x-slice of the 2-D double well: f(x) = x^4 - 4x^3 - 36x^2 + 864.
std::unique_ptr<Objective> double_well_1d(const TorusDomain& domain);

/// l(z; theta) = ||theta - z||^2 / 2 over the given centers.
std::unique_ptr<Objective> quadratic_bowl(const TorusDomain& domain, std::vector<Vector> centers);

/// Synthetic linear regression: x ~ N(0, I_d), y = <w*, x> + noise * N(0, 1),
/// l = (<theta, x> - y)^2 / 2.
struct LinregData {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  double noise = 0.0;
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  std::vector<double> true_weights;

  nlohmann::json to_json() const;
  static LinregData from_json(const nlohmann::json& j);
};

/// Draws `n` samples. The true weights come from the first d normals of the
/// stream so that train and test sets built with the same seed and different
/// `sample_stream` share them.
LinregData generate_linreg(std::size_t n, std::size_t d, double noise, std::uint64_t seed,
                           std::uint64_t sample_stream = 0);

std::unique_ptr<Objective> linreg_objective(const TorusDomain& domain, LinregData data);
std::unique_ptr<Objective> linreg_synthetic(const TorusDomain& domain, std::size_t n, std::size_t d,
                                            double noise, std::uint64_t seed);

/// Builds an objective from {"name": ..., "domain": {...}, ...}.
std::unique_ptr<Objective> make_objective(const nlohmann::json& spec);

struct ObjectiveInfo {
  std::string name;
  std::string description;
};
std::vector<ObjectiveInfo> list_objectives();

}  // namespace psgd

#endif
