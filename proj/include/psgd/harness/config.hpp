#ifndef PSGD_HARNESS_CONFIG_HPP
#define PSGD_HARNESS_CONFIG_HPP

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psgd/types.hpp"

namespace psgd::harness {

enum class ExperimentKind { kEscape, kStationarity, kBetaSweep, kCoupling, kGeneralization, kBaseline };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

enum class AlgorithmType { kPoissonSgd, kBps, kSgd, kSgld };

std::string to_string(AlgorithmType type);
AlgorithmType algorithm_type_from_string(const std::string& s);

/// One optimizer or sampler column of an experiment. Fields that do not apply
/// to `type` are ignored; sweeps override beta (and epsilon) per cell.
struct AlgorithmSpec {
  std::string label;
  AlgorithmType type = AlgorithmType::kPoissonSgd;
  double beta = 1.0;
  double epsilon = 1.0;
  /// BPS: share of the event floor given to C_B; lambda_ref takes the rest.
  double c_b = 0.0;
  /// Plain SGD / SGLD step size.
  double learning_rate = 1e-3;
  /// SGLD noise; when absent it is sqrt(2 lr / beta).
  std::optional<double> noise_std;
  std::size_t steps = 0;
  /// 0 means full batch.
  std::size_t batch_size = 0;

  nlohmann::json to_json() const;
  static AlgorithmSpec from_json(const nlohmann::json& j);
};

/// Starting point or velocity: a fixed vector, or a uniform draw per trial.
struct InitSpec {
  bool uniform = true;
  Vector value;

  nlohmann::json to_json() const;
  static InitSpec from_json(const nlohmann::json& j);
};

/// Fully self-describing experiment. Rerunning the same config (with the same
/// seed) reproduces every persisted output byte-for-byte on one platform.
///
/// Trial t runs with seed `seed + t`. Within a trial, algorithm i of sweep cell c
/// uses stream 64 c + i, and the shared initial point and velocity come from
/// stream kInitStream so that all algorithms of a trial start together.
struct ExperimentConfig {
  static constexpr std::uint64_t kInitStream = 1'000'000;

  std::string name;
  ExperimentKind kind = ExperimentKind::kBaseline;
  nlohmann::json objective;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  /// Where to write outputs. Not part of the serialized config or its hash, so
  /// the same experiment run into two directories gets identical files.
  std::string output_dir;
  InitSpec initial_point;
  InitSpec initial_velocity;
  /// Kind-specific parameters (checkpoints, sweeps, thresholds' inputs, ...).
  nlohmann::json params = nlohmann::json::object();

  std::uint64_t trial_seed(std::size_t trial) const { return seed + trial; }
  std::vector<std::uint64_t> seed_list() const;

  /// Structural checks that need no objective; run_experiment validates the rest.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

}  // namespace psgd::harness

#endif
