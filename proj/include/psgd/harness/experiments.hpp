#ifndef PSGD_HARNESS_EXPERIMENTS_HPP
#define PSGD_HARNESS_EXPERIMENTS_HPP

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "psgd/harness/config.hpp"
#include "psgd/objective.hpp"
#include "psgd/run_record.hpp"

namespace psgd::harness {

/// Summary table with named columns and JSON-valued cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  std::size_t column(const std::string& name) const;
  const nlohmann::json& at(std::size_t row, const std::string& name) const;
  double number(std::size_t row, const std::string& name) const { return at(row, name).get<double>(); }
  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;
};

/// One column of the experiment's output: an algorithm, possibly with sweep
/// overrides. Every trial produces one RunRecord per cell.
struct Cell {
  std::string name;
  AlgorithmSpec algorithm;
  std::uint64_t stream = 0;
  /// Sweep coordinates (beta, n, epsilon) for the summary table.
  nlohmann::json coords = nlohmann::json::object();
};

std::vector<Cell> experiment_cells(const ExperimentConfig& cfg);

/// records[c][t] is the record of cell c in trial t.
struct ExperimentData {
  ExperimentConfig config;
  std::vector<Cell> cells;
  std::vector<std::vector<RunRecord>> records;
};

struct Analysis {
  Table summary;
  /// Flags and derived values that do not fit the table.
  nlohmann::json notes = nlohmann::json::object();
};

/// Worker count from PSGD_WORKERS, defaulting to the hardware concurrency.
std::size_t worker_count();

/// Runs task(0..n-1) on the worker pool; rethrows the first failure.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

/// Runs every trial and keeps the records in memory. Nothing is written.
ExperimentData run_trials(const ExperimentConfig& cfg);

/// Builds the summary from records alone.
Analysis analyze(const ExperimentData& data);

/// Writes config, records, summary and auxiliary files into `dir`.
/// The manifest must already be in place.
void persist(const ExperimentData& data, const Analysis& analysis, const std::filesystem::path& dir);

/// Loads a run directory written by persist().
ExperimentData load_run(const std::filesystem::path& dir);

struct RunOutcome {
  ExperimentData data;
  Analysis analysis;
  double wall_seconds = 0.0;
};

/// run_trials + analyze, persisted under cfg.output_dir when it is set. The
/// manifest is checked before any work starts; wall time goes to timing.json,
/// which is the only output that differs between identical reruns.
RunOutcome run_experiment(const ExperimentConfig& cfg);

/// Reloads a run directory, recomputes its summary and rewrites the summary files.
Analysis analyze_run_dir(const std::filesystem::path& dir);

}  // namespace psgd::harness

#endif
