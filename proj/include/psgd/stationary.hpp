#ifndef PSGD_STATIONARY_HPP
#define PSGD_STATIONARY_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "psgd/grid.hpp"
#include "psgd/objective.hpp"
#include "psgd/rng.hpp"

namespace psgd {

/// a_d = Gamma(d/2) / (sqrt(pi) Gamma(d/2 + 1/2)), via log-gamma.
double a_d(std::size_t d);

/// Closed-form limit law of Poisson SGD / coupled BPS:
///
///   u(theta) = (beta M + 1/epsilon + w beta ||grad L(theta)||) exp(-beta L(theta))
///
/// with gradient weight w = a_d by default. M is the objective's declared bound.
class StationaryDensity {
 public:
  StationaryDensity(const Objective& obj, double beta, double epsilon);
  StationaryDensity(const Objective& obj, double beta, double epsilon, double gradient_weight);

  const Objective& objective() const { return *obj_; }
  double beta() const { return beta_; }
  double epsilon() const { return epsilon_; }
  double gradient_weight() const { return weight_; }
  /// beta M + 1/epsilon.
  double floor() const { return floor_; }

  double unnormalized(const VectorRef& theta) const;

 private:
  const Objective* obj_;
  double beta_;
  double epsilon_;
  double weight_;
  double floor_;
  mutable Vector grad_;
};

class NonConvergentQuadrature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnvelopeViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Midpoint-rule normalization on the objective's domain. Each cell is
/// integrated on a `subdivisions`^d sub-grid; the same computation at twice
/// the resolution must agree on Z to 1e-4 relative or NonConvergentQuadrature
/// is thrown. Requires dim <= 3 and at least 64 cells per axis.
GridDensity normalize_on_grid(const StationaryDensity& sd, std::vector<std::size_t> resolution,
                              std::size_t subdivisions = 4);

struct OracleStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  double envelope = 0.0;

  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

/// Rejection sampling from the uniform law on the domain with envelope
/// 1.1 * grid.max_unnormalized. Throws EnvelopeViolation if any proposal
/// exceeds the envelope.
std::vector<Vector> sample_stationary_oracle(const StationaryDensity& sd, const GridDensity& grid,
                                             std::size_t n, RngStream& rng,
                                             OracleStats* stats = nullptr);

struct CosPlusEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  /// a_d / 2.
  double exact = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
};

/// Monte-Carlo estimate of E[(v_1)_+] for v uniform on S^{d-1}, with the
/// closed form a_d / 2 and the bracket [1/sqrt(2 pi d), 1/sqrt(2 pi (d-1))].
CosPlusEstimate cos_plus_expectation_check(std::size_t d, std::size_t n, RngStream& rng);

}  // namespace psgd

#endif
