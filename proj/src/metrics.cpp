#include "psgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "psgd/sampler.hpp"

namespace psgd {

double wasserstein1_1d(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("wasserstein1_1d: empty sample");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc / static_cast<double>(a.size());
  }
  // Sweep the merged support, integrating |F - G| between consecutive atoms.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(a.front(), b.front());
  double acc = 0.0;
  while (i < a.size() || j < b.size()) {
    const double next = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    acc += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
    while (i < a.size() && a[i] == next) ++i;
    while (j < b.size() && b[j] == next) ++j;
    prev = next;
  }
  return acc;
}

double sliced_wasserstein1(const std::vector<Vector>& xs, const std::vector<Vector>& ys,
                           std::size_t n_projections, RngStream& rng) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("sliced_wasserstein1: empty cloud");
  const auto d = static_cast<std::size_t>(xs.front().size());
  for (const auto& x : xs) require_dim(d, x.size());
  for (const auto& y : ys) require_dim(d, y.size());
  std::vector<double> px(xs.size());
  std::vector<double> py(ys.size());
  if (d == 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) px[i] = xs[i][0];
    for (std::size_t i = 0; i < ys.size(); ++i) py[i] = ys[i][0];
    return wasserstein1_1d(px, py);
  }
  if (n_projections == 0) throw std::invalid_argument("sliced_wasserstein1: no projections");
  Vector dir(static_cast<Eigen::Index>(d));
  double acc = 0.0;
  for (std::size_t p = 0; p < n_projections; ++p) {
    uniform_sphere(rng, dir);
    for (std::size_t i = 0; i < xs.size(); ++i) px[i] = xs[i].dot(dir);
    for (std::size_t i = 0; i < ys.size(); ++i) py[i] = ys[i].dot(dir);
    acc += wasserstein1_1d(px, py);
  }
  return acc / static_cast<double>(n_projections);
}

std::vector<double> histogram(const std::vector<Vector>& samples, const GridDensity& grid) {
  if (samples.empty()) throw std::invalid_argument("histogram: no samples");
  std::vector<double> freq(grid.num_cells(), 0.0);
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const auto& s : samples) freq[grid.cell_index(s)] += w;
  return freq;
}

double histogram_tv(std::span<const double> empirical_mass, std::span<const double> reference_mass) {
  if (empirical_mass.size() != reference_mass.size()) {
    throw std::invalid_argument("histogram_tv: bin layouts differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < empirical_mass.size(); ++i) {
    acc += std::abs(empirical_mass[i] - reference_mass[i]);
  }
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

double histogram_tv(const std::vector<Vector>& samples, const GridDensity& reference) {
  const auto freq = histogram(samples, reference);
  return histogram_tv(freq, reference.mass);
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}

MeanEstimate mean_with_se(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean_with_se: empty sample");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

LemmaCheckResult lemma_wasserstein_bound_check(const std::function<double(double)>& f1,
                                               const std::function<double(double)>& f2,
                                               std::span<const double> grid, double M, double m1,
                                               double m2, std::size_t n, RngStream& rng) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(M >= 0.0)) {
    throw std::invalid_argument("lemma check: need M >= 0, m1 > 0, m2 > 0");
  }
  if (grid.empty() || n < 2) throw std::invalid_argument("lemma check: empty grid or sample");
  for (double t : grid) {
    const double a = f1(t);
    const double b = f2(t);
    if (a < m1 || b < m2 || std::abs(b - a) > M * (1.0 + 1e-12)) {
      throw std::invalid_argument("lemma check: precondition violated at t = " + std::to_string(t));
    }
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> gaps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double t1 = invert_integrated_rate(f1, u, m1, kInf, 1e-9);
    const double t2 = invert_integrated_rate(f2, u, m2, kInf, 1e-9);
    gaps[i] = std::abs(t1 - t2);
  }
  const auto est = mean_with_se(gaps);
  LemmaCheckResult r;
  r.measured_w1 = est.mean;
  r.standard_error = est.standard_error;
  r.bound = M / (m1 * m2);
  r.pass = r.measured_w1 <= r.bound + 3.0 * r.standard_error;
  return r;
}

}  // namespace psgd
