#ifndef PSGD_METRICS_HPP
#define PSGD_METRICS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "psgd/grid.hpp"
#include "psgd/rng.hpp"
#include "psgd/types.hpp"

namespace psgd {

/// Exact W1 between two empirical measures on the line, computed as the
/// integral of |F - G| between the empirical CDFs. For equal sizes this is the
/// mean absolute difference of the sorted samples.
double wasserstein1_1d(std::span<const double> xs, std::span<const double> ys);

/// Mean of wasserstein1_1d over `n_projections` uniform directions on the
/// sphere. In one dimension this is wasserstein1_1d itself.
double sliced_wasserstein1(const std::vector<Vector>& xs, const std::vector<Vector>& ys,
                           std::size_t n_projections, RngStream& rng);

/// 1/2 sum over cells of |empirical frequency - reference mass|.
double histogram_tv(const std::vector<Vector>& samples, const GridDensity& reference);
double histogram_tv(std::span<const double> empirical_mass, std::span<const double> reference_mass);

/// Empirical cell frequencies of `samples` on the grid's cells.
std::vector<double> histogram(const std::vector<Vector>& samples, const GridDensity& grid);

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);

struct LemmaCheckResult {
  bool pass = false;
  double measured_w1 = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
};

/// Empirical check of W1(P1, P2) <= M / (m1 m2) for the first-arrival laws
/// P_i(eta >= t) = exp(-int_0^t f_i). Preconditions |f2 - f1| <= M, f1 >= m1,
/// f2 >= m2 are verified on `grid` (throws std::invalid_argument otherwise).
/// Draws are paired through a common uniform, which is the monotone (optimal)
/// coupling on the line, so the mean |t1 - t2| is an unbiased W1 estimate.
LemmaCheckResult lemma_wasserstein_bound_check(const std::function<double(double)>& f1,
                                               const std::function<double(double)>& f2,
                                               std::span<const double> grid, double M, double m1,
                                               double m2, std::size_t n, RngStream& rng);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

MeanEstimate mean_with_se(std::span<const double> xs);

}  // namespace psgd

#endif
