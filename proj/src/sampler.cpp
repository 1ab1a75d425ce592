#include "psgd/sampler.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psgd {

void uniform_sphere(RngStream& rng, Vector& out) {
  if (out.size() < 1) throw std::invalid_argument("sphere dimension must be at least 1");
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
    norm = out.norm();
  } while (!(norm > 0.0));
  out /= norm;
}

Vector uniform_sphere(std::size_t d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sphere dimension must be at least 1");
  Vector v(static_cast<Eigen::Index>(d));
  uniform_sphere(rng, v);
  return v;
}

namespace {

double integrate(const std::function<double(double)>& rate, double a, double b, double abs_tol) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(rate, b, a, abs_tol);
  // Integrate on [0, 1] after rescaling. Boost mixes panel-local error units
  // with the interval scale, which on short intervals defeats its stopping rule.
  const double width = b - a;
  const auto unit = [&](double s) { return width * rate(a + width * s); };
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      unit, 0.0, 1.0, 20, 1e-13, &error, &l1);
  // Panel errors are reported in units of [-1, 1]; halving bounds them on [0, 1].
  error *= 0.5;
  if (!std::isfinite(value) || error > abs_tol) {
    std::ostringstream msg;
    msg << std::scientific << "rate quadrature did not converge on [" << a << ", " << b
        << "], error estimate " << error << ", L1 " << l1;
    throw QuadratureFailure(msg.str());
  }
  return value;
}

}  // namespace

double invert_integrated_rate(const std::function<double(double)>& rate, double u, double lower_rate,
                              double upper_rate, double tol) {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("u must lie in [0, 1)");
  if (!(lower_rate > 0.0) || !(upper_rate >= lower_rate) || !(tol > 0.0)) {
    throw std::invalid_argument("invert_integrated_rate: need 0 < lower <= upper and tol > 0");
  }
  const double target = -std::log1p(-u);
  if (target == 0.0) return 0.0;

  // Lambda(t) is increasing with slope in [lower, upper].
  double lo = target / upper_rate;
  double hi = target / lower_rate;
  // Accuracy demanded of Lambda so that the induced error in t stays below tol.
  const double lambda_tol = 0.1 * tol * lower_rate;

  double t = lo;
  double lambda_t = integrate(rate, 0.0, t, lambda_tol);
  for (int iter = 0; iter < 200; ++iter) {
    const double residual = lambda_t - target;
    if (std::abs(residual) <= lambda_tol || hi - lo <= tol) return t;
    if (residual < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t - residual / rate(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lambda_t += integrate(rate, t, next, lambda_tol);
    t = next;
  }
  throw QuadratureFailure("CDF inversion did not converge");
}

}  // namespace psgd
