#ifndef PSGD_SAMPLER_HPP
#define PSGD_SAMPLER_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "psgd/domain.hpp"
#include "psgd/objective.hpp"
#include "psgd/rng.hpp"
#include "psgd/types.hpp"

namespace psgd {

/// Uniform draw on the unit sphere S^{d-1} (normalized standard Gaussian).
Vector uniform_sphere(std::size_t d, RngStream& rng);
void uniform_sphere(RngStream& rng, Vector& out);

/// Raised when a ray rate drops below its floor; the floor is added by
/// construction, so this means a NaN or a broken gradient field.
class RateFloorViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Event rate along the ray theta + r v:
///
///   rate(r) = beta * <g(wrap(theta + r v)), v>_+ + floor,
///
/// bounded above by beta * M + floor where M bounds ||g||. Both ends are
/// checked on every evaluation. The field is any callable
/// `void(const VectorRef& point, Vector& grad)`.
///
/// Holds scratch buffers, so one instance serves one caller at a time.
template <class Field>
class RayRate {
 public:
  RayRate(const TorusDomain& domain, double beta, double floor, double grad_bound, Field field)
      : domain_(&domain),
        beta_(beta),
        floor_(floor),
        grad_bound_(grad_bound),
        field_(std::move(field)),
        point_(static_cast<Eigen::Index>(domain.dim())),
        grad_(static_cast<Eigen::Index>(domain.dim())) {
    if (!(beta >= 0.0) || !(floor > 0.0) || !(grad_bound > 0.0) || !std::isfinite(upper_bound())) {
      throw std::invalid_argument("ray rate needs beta >= 0, floor > 0 and a finite bound");
    }
  }

  RayRate(const TorusDomain& domain, const VectorRef& base, const VectorRef& direction, double beta,
          double floor, double grad_bound, Field field)
      : RayRate(domain, beta, floor, grad_bound, std::move(field)) {
    reset(base, direction);
  }

  void reset(const VectorRef& base, const VectorRef& direction) {
    require_dim(domain_->dim(), base.size());
    require_dim(domain_->dim(), direction.size());
    if (std::abs(direction.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("ray direction must be a unit vector");
    }
    base_ = base;
    direction_ = direction;
  }

  double beta() const { return beta_; }
  double floor() const { return floor_; }
  double upper_bound() const { return beta_ * grad_bound_ + floor_; }
  const Vector& base() const { return base_; }
  const Vector& direction() const { return direction_; }

  double operator()(double r) const {
    point_ = base_ + r * direction_;
    domain_->wrap_in_place(point_);
    field_(point_, grad_);
    const double slope = grad_.dot(direction_);
    const double rate = beta_ * (slope > 0.0 ? slope : 0.0) + floor_;
    if (!(rate >= floor_)) {
      throw RateFloorViolation("ray rate below floor at r = " + std::to_string(r));
    }
    if (rate > upper_bound() * (1.0 + 1e-9)) {
      throw GradientBoundViolation("ray rate " + std::to_string(rate) + " exceeds ceiling " +
                                   std::to_string(upper_bound()));
    }
    return rate;
  }

 private:
  const TorusDomain* domain_;
  double beta_;
  double floor_;
  double grad_bound_;
  Field field_;
  Vector base_;
  Vector direction_;
  mutable Vector point_;
  mutable Vector grad_;
};

/// Exact draw of the first arrival of the inhomogeneous Poisson process with
/// intensity `rate` on [0, inf), i.e. P(eta >= t) = exp(-int_0^t rate), by
/// thinning a homogeneous process at rate.upper_bound().
template <class Rate>
double sample_ray_exponential(const Rate& rate, RngStream& rng) {
  const double ceiling = rate.upper_bound();
  double r = 0.0;
  for (;;) {
    r += rng.exponential(ceiling);
    const double lambda = rate(r);
    if (rng.uniform() * ceiling < lambda) return r;
  }
}

/// Solves int_0^t rate(s) ds = -log(1 - u) for t by Gauss-Kronrod quadrature
/// and safeguarded Newton steps; the root is bracketed by the rate bounds
/// [lower_rate, upper_rate]. Returns t to absolute tolerance `tol`.
double invert_integrated_rate(const std::function<double(double)>& rate, double u, double lower_rate,
                              double upper_rate, double tol);

/// Same law as sample_ray_exponential, realized by numerical CDF inversion.
/// Test oracle; orders of magnitude slower than thinning.
template <class Rate>
double sample_ray_exponential_oracle(const Rate& rate, RngStream& rng, double tol = 1e-9) {
  const double u = rng.uniform();
  return invert_integrated_rate([&rate](double r) { return rate(r); }, u, rate.floor(),
                                rate.upper_bound(), tol);
}

}  // namespace psgd

#endif
