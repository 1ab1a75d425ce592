#ifndef PSGD_RNG_HPP
#define PSGD_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace psgd {

/// Seedable single-owner random stream.
///
/// The bit stream comes from mt19937_64 seeded through std::seed_seq with
/// (seed, stream id), both of which are specified exactly by the standard, so
/// the integer draws are identical on every platform. Uniform reals are built
/// from the top 53 bits here rather than through std::uniform_real_distribution
/// for the same reason. Gaussian draws go through std::normal_distribution and
/// are only reproducible within one standard library.
class RngStream {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/seed_seq";

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t draws() const { return draws_; }

  /// Independent child stream for sub-task `index`.
  RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Exp(rate) by inversion.
  double exponential(double rate);

  double normal();

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace psgd

#endif
