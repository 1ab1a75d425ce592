#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "psgd/harness/experiments.hpp"
#include "psgd/harness/manifest.hpp"

using namespace psgd;
using namespace psgd::harness;

namespace {

const std::filesystem::path kConfigs = PSGD_TEST_CONFIG_DIR;

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "psgd-harness-test" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config hash ignores the output directory") {
  auto cfg = ExperimentConfig::load((kConfigs / "smoke/escape.json").string());
  const auto h = config_hash(cfg);
  cfg.output_dir = "/somewhere/else";
  CHECK(config_hash(cfg) == h);
  cfg.seed += 1;
  CHECK(config_hash(cfg) != h);
}

TEST_CASE("rerunning into the same directory keeps the manifest, a changed config conflicts") {
  auto cfg = ExperimentConfig::load((kConfigs / "smoke/baseline.json").string());
  cfg.output_dir = scratch("manifest").string();
  run_experiment(cfg);
  const auto manifest = slurp(std::filesystem::path(cfg.output_dir) / "manifest.json");
  run_experiment(cfg);
  CHECK(slurp(std::filesystem::path(cfg.output_dir) / "manifest.json") == manifest);
  cfg.trials += 1;
  CHECK_THROWS_AS(run_experiment(cfg), ManifestConflict);
}

TEST_CASE("summaries are regenerated from persisted records alone") {
  for (const char* name : {"escape", "stationarity", "beta_sweep", "coupling", "generalization", "baseline"}) {
    CAPTURE(name);
    auto cfg = ExperimentConfig::load((kConfigs / "smoke" / (std::string(name) + ".json")).string());
    const auto dir = scratch(std::string("analyze_") + name);
    cfg.output_dir = dir.string();
    const auto outcome = run_experiment(cfg);
    const auto csv = slurp(dir / "summary.csv");
    const auto json = slurp(dir / "summary.json");
    std::filesystem::remove(dir / "summary.csv");
    std::filesystem::remove(dir / "summary.json");
    const auto again = analyze_run_dir(dir);
    CHECK(again.summary.to_json() == outcome.analysis.summary.to_json());
    CHECK(slurp(dir / "summary.csv") == csv);
    CHECK(slurp(dir / "summary.json") == json);

    const auto data = load_run(dir);
    REQUIRE(data.records.size() == outcome.data.records.size());
    for (std::size_t c = 0; c < data.records.size(); ++c) {
      REQUIRE(data.records[c].size() == cfg.trials);
      CHECK(data.records[c].back().final_theta == outcome.data.records[c].back().final_theta);
    }
  }
}

TEST_CASE("tampered config is rejected on analysis") {
  auto cfg = ExperimentConfig::load((kConfigs / "smoke/baseline.json").string());
  const auto dir = scratch("tamper");
  cfg.output_dir = dir.string();
  run_experiment(cfg);
  auto j = nlohmann::json::parse(slurp(dir / "config.json"));
  j["seed"] = 999;
  std::ofstream(dir / "config.json") << j.dump(2);
  CHECK_THROWS_AS(analyze_run_dir(dir), ManifestConflict);
}

TEST_CASE("worker count does not change results") {
  auto cfg = ExperimentConfig::load((kConfigs / "smoke/escape.json").string());
  setenv("PSGD_WORKERS", "1", 1);
  const auto serial = run_experiment(cfg);
  setenv("PSGD_WORKERS", "4", 1);
  const auto parallel = run_experiment(cfg);
  unsetenv("PSGD_WORKERS");
  CHECK(serial.analysis.summary.to_json() == parallel.analysis.summary.to_json());
  for (std::size_t c = 0; c < serial.data.records.size(); ++c) {
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      CHECK(serial.data.records[c][t].final_theta == parallel.data.records[c][t].final_theta);
    }
  }
}
