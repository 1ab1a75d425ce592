#ifndef PSGD_RUN_RECORD_HPP
#define PSGD_RUN_RECORD_HPP

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psgd/types.hpp"

namespace psgd {

enum class VelocityEvent { kReflect, kRefresh, kSkipped };

std::string to_string(VelocityEvent e);
VelocityEvent velocity_event_from_string(const std::string& s);

struct StepRecord {
  std::size_t k = 0;
  Vector theta;
  Vector velocity;
  double eta = 0.0;
  std::vector<std::size_t> batch;
  double grad_norm = 0.0;
  VelocityEvent event = VelocityEvent::kReflect;
};

/// Persisted trajectory of one run.
///
/// Serialized as newline-delimited JSON: a header object, one object per
/// recorded step, and a final-state object. Only every `stride`-th step (and
/// step K) is kept; stride 1 keeps all K steps. Wall time is kept out of the
/// serialized form so that replays compare byte-for-byte.
struct RunRecord {
  std::string algorithm;
  nlohmann::json config;
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t total_steps = 0;
  std::size_t stride = 1;
  std::vector<StepRecord> steps;
  Vector final_theta;
  Vector final_velocity;
  double wall_time_seconds = 0.0;

  void write_ndjson(std::ostream& out) const;
  /// Reads one record; std::nullopt at end of stream.
  static std::optional<RunRecord> read_ndjson(std::istream& in);
  static std::vector<RunRecord> read_all_ndjson(std::istream& in);

  /// k, theta_1..theta_d, eta per recorded step.
  void write_csv(std::ostream& out) const;

  std::size_t count(VelocityEvent e) const;
};

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

}  // namespace psgd

#endif
