#include "psgd/harness/config.hpp"

#include <fstream>
#include <stdexcept>

#include "psgd/run_record.hpp"

namespace psgd::harness {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {{ExperimentKind::kEscape, "escape"},
                               {ExperimentKind::kStationarity, "stationarity"},
                               {ExperimentKind::kBetaSweep, "beta_sweep"},
                               {ExperimentKind::kCoupling, "coupling"},
                               {ExperimentKind::kGeneralization, "generalization"},
                               {ExperimentKind::kBaseline, "baseline"}};

struct TypeName {
  AlgorithmType type;
  const char* name;
};

constexpr TypeName kTypes[] = {{AlgorithmType::kPoissonSgd, "poisson_sgd"},
                               {AlgorithmType::kBps, "bps"},
                               {AlgorithmType::kSgd, "sgd"},
                               {AlgorithmType::kSgld, "sgld"}};

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (const auto& k : kKinds) {
    if (s == k.name) return k.kind;
  }
  throw std::invalid_argument("unknown experiment kind: " + s);
}

std::string to_string(AlgorithmType type) {
  for (const auto& t : kTypes) {
    if (t.type == type) return t.name;
  }
  throw std::invalid_argument("unknown algorithm type");
}

AlgorithmType algorithm_type_from_string(const std::string& s) {
  for (const auto& t : kTypes) {
    if (s == t.name) return t.type;
  }
  throw std::invalid_argument("unknown algorithm type: " + s);
}

nlohmann::json AlgorithmSpec::to_json() const {
  nlohmann::json j = {{"label", label},
                      {"type", to_string(type)},
                      {"beta", beta},
                      {"epsilon", epsilon},
                      {"c_b", c_b},
                      {"learning_rate", learning_rate},
                      {"steps", steps},
                      {"batch_size", batch_size}};
  if (noise_std) j["noise_std"] = *noise_std;
  return j;
}

AlgorithmSpec AlgorithmSpec::from_json(const nlohmann::json& j) {
  AlgorithmSpec a;
  a.type = algorithm_type_from_string(j.at("type").get<std::string>());
  a.label = j.value("label", to_string(a.type));
  a.beta = j.value("beta", 1.0);
  a.epsilon = j.value("epsilon", 1.0);
  a.c_b = j.value("c_b", 0.0);
  a.learning_rate = j.value("learning_rate", 1e-3);
  if (j.contains("noise_std")) a.noise_std = j.at("noise_std").get<double>();
  a.steps = j.at("steps").get<std::size_t>();
  a.batch_size = j.value("batch_size", std::size_t{0});
  return a;
}

nlohmann::json InitSpec::to_json() const {
  if (uniform) return "uniform";
  return vector_to_json(value);
}

InitSpec InitSpec::from_json(const nlohmann::json& j) {
  InitSpec s;
  if (j.is_string()) {
    if (j.get<std::string>() != "uniform") {
      throw std::invalid_argument("initial value must be a vector or \"uniform\"");
    }
    return s;
  }
  s.uniform = false;
  s.value = vector_from_json(j);
  return s;
}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t t = 0; t < trials; ++t) seeds[t] = trial_seed(t);
  return seeds;
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw std::invalid_argument("experiment needs at least one trial");
  if (!objective.is_object() || !objective.contains("name")) {
    throw std::invalid_argument("experiment needs an objective spec with a name");
  }
  // Sweeps use the first algorithm as the template for every cell.
  if (algorithms.empty()) throw std::invalid_argument("experiment lists no algorithms");
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (algorithms[i].label == algorithms[j].label) {
        throw std::invalid_argument("duplicate algorithm label: " + algorithms[i].label);
      }
    }
  }
  if (algorithms.size() > 64) throw std::invalid_argument("at most 64 algorithms per experiment");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json algs = nlohmann::json::array();
  for (const auto& a : algorithms) algs.push_back(a.to_json());
  return {{"name", name},
          {"kind", to_string(kind)},
          {"objective", objective},
          {"algorithms", algs},
          {"trials", trials},
          {"seed", seed},
          {"initial_point", initial_point.to_json()},
          {"initial_velocity", initial_velocity.to_json()},
          {"params", params}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
  c.name = j.value("name", to_string(c.kind));
  c.objective = j.at("objective");
  if (j.contains("algorithms")) {
    for (const auto& a : j.at("algorithms")) c.algorithms.push_back(AlgorithmSpec::from_json(a));
  }
  c.trials = j.value("trials", std::size_t{1});
  c.seed = j.value("seed", std::uint64_t{0});
  c.output_dir = j.value("output_dir", std::string());
  if (j.contains("initial_point")) c.initial_point = InitSpec::from_json(j.at("initial_point"));
  if (j.contains("initial_velocity")) {
    c.initial_velocity = InitSpec::from_json(j.at("initial_velocity"));
  }
  c.params = j.value("params", nlohmann::json::object());
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return from_json(nlohmann::json::parse(in));
}

}  // namespace psgd::harness
