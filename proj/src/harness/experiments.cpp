#include "psgd/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "psgd/baselines.hpp"
#include "psgd/bps.hpp"
#include "psgd/harness/manifest.hpp"
#include "psgd/metrics.hpp"
#include "psgd/poisson_sgd.hpp"
#include "psgd/sampler.hpp"
#include "psgd/stationary.hpp"

namespace psgd::harness {

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

const nlohmann::json& Table::at(std::size_t row, const std::string& name) const {
  return rows.at(row).at(column(name));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << (row[i].is_string() ? row[i].get<std::string>() : row[i].dump());
    }
    out << '\n';
  }
}

nlohmann::json Table::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row.at(i);
    out.push_back(std::move(obj));
  }
  return out;
}

namespace {

// Offsets of the auxiliary random streams used by the analysis.
constexpr std::uint64_t kOracleStream = 2'000'000;
constexpr std::uint64_t kNoiseFloorStream = 3'000'000;
constexpr std::uint64_t kProjectionStream = 4'000'000;

std::string fmt(double x) { return nlohmann::json(x).dump(); }

template <class T>
std::vector<T> list_param(const nlohmann::json& params, const char* key, std::vector<T> fallback) {
  if (!params.contains(key)) return fallback;
  return params.at(key).get<std::vector<T>>();
}

std::vector<std::size_t> resolution_param(const nlohmann::json& params, const char* key,
                                          std::size_t dim, std::size_t fallback) {
  if (!params.contains(key)) return std::vector<std::size_t>(dim, fallback);
  const auto& j = params.at(key);
  if (j.is_number()) return std::vector<std::size_t>(dim, j.get<std::size_t>());
  return j.get<std::vector<std::size_t>>();
}

MeanEstimate estimate(const std::vector<double>& xs) { return mean_with_se(xs); }

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const auto m = mean_with_se(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m.mean) * (x - m.mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

/// Which steps of a run are kept in its RunRecord.
struct Schedule {
  std::size_t stride = 0;
  std::vector<std::size_t> steps;

  bool keep(std::size_t k, std::size_t total) const {
    if (k == total) return true;
    if (stride != 0 && k % stride == 0) return true;
    return std::binary_search(steps.begin(), steps.end(), k);
  }
};

/// Steps pooled into the sample at checkpoint c: c, c - s, ..., W states spaced
/// s = max(1, c / (2W)) apart, so the window covers the second half of [0, c].
std::vector<std::size_t> window_steps(std::size_t c, std::size_t window) {
  std::vector<std::size_t> out;
  const std::size_t spacing = std::max<std::size_t>(1, c / (2 * window));
  for (std::size_t j = 0; j < window && j * spacing < c; ++j) out.push_back(c - j * spacing);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> checkpoints_for(const ExperimentConfig& cfg, const AlgorithmSpec& a) {
  auto cps = list_param<std::size_t>(cfg.params, "checkpoints", {a.steps});
  for (auto c : cps) {
    if (c > a.steps) throw std::invalid_argument("checkpoint beyond the configured step count");
  }
  return cps;
}

std::size_t window_for(const ExperimentConfig& cfg) {
  const auto w = cfg.params.value("window", std::size_t{1});
  if (w == 0) throw std::invalid_argument("window must be positive");
  return w;
}

Schedule schedule_for(const ExperimentConfig& cfg, const AlgorithmSpec& a) {
  Schedule s;
  const std::size_t K = a.steps;
  switch (cfg.kind) {
    case ExperimentKind::kEscape:
    case ExperimentKind::kBaseline:
      s.stride = cfg.params.value("record_stride", std::max<std::size_t>(1, K / 1000));
      break;
    case ExperimentKind::kBetaSweep:
    case ExperimentKind::kGeneralization:
      s.stride = cfg.params.value("record_stride", std::max<std::size_t>(1, K));
      break;
    case ExperimentKind::kStationarity: {
      std::set<std::size_t> keep;
      for (auto c : checkpoints_for(cfg, a)) {
        for (auto k : window_steps(c, window_for(cfg))) keep.insert(k);
      }
      s.steps.assign(keep.begin(), keep.end());
      break;
    }
    case ExperimentKind::kCoupling: {
      auto cps = checkpoints_for(cfg, a);
      std::sort(cps.begin(), cps.end());
      s.steps = cps;
      break;
    }
  }
  if (cfg.params.contains("record_stride") && s.stride == 0) {
    s.stride = cfg.params.at("record_stride").get<std::size_t>();
  }
  return s;
}

template <class Sampler>
RunRecord record_with(Sampler& sampler, const std::string& algorithm, nlohmann::json config,
                      std::size_t steps, const Schedule& schedule) {
  RunRecord rec;
  rec.algorithm = algorithm;
  rec.rng_algorithm = std::string(RngStream::kAlgorithm);
  rec.seed = sampler.config().seed;
  rec.stream = sampler.config().stream;
  rec.total_steps = steps;
  rec.stride = schedule.stride;
  if (!schedule.steps.empty()) config["record_steps"] = schedule.steps;
  rec.config = std::move(config);
  const auto start = std::chrono::steady_clock::now();
  OptimizerState state = sampler.initial_state();
  for (std::size_t k = 1; k <= steps; ++k) {
    if (schedule.keep(k, steps)) {
      rec.steps.push_back(sampler.step(state));
    } else {
      sampler.advance(state);
    }
  }
  rec.final_theta = state.theta;
  rec.final_velocity = state.velocity;
  rec.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

RunRecord run_algorithm(const Objective& obj, const AlgorithmSpec& a, const Vector& x0, const Vector& v0,
                        std::uint64_t seed, std::uint64_t stream, const Schedule& schedule) {
  switch (a.type) {
    case AlgorithmType::kPoissonSgd: {
      PoissonSgdConfig c;
      c.beta = a.beta;
      c.epsilon = a.epsilon;
      c.steps = a.steps;
      c.batch_size = a.batch_size;
      c.initial_point = x0;
      c.initial_velocity = v0;
      c.seed = seed;
      c.stream = stream;
      PoissonSgd sampler(obj, c);
      auto json = c.to_json();
      json["label"] = a.label;
      return record_with(sampler, "poisson_sgd", std::move(json), a.steps, schedule);
    }
    case AlgorithmType::kBps: {
      BpsConfig c = BpsConfig::coupled_with(obj, a.beta, a.epsilon, a.c_b);
      c.steps = a.steps;
      c.initial_point = x0;
      c.initial_velocity = v0;
      c.seed = seed;
      c.stream = stream;
      BouncyParticleSampler sampler(obj, c);
      auto json = c.to_json();
      json["label"] = a.label;
      return record_with(sampler, "bps", std::move(json), a.steps, schedule);
    }
    case AlgorithmType::kSgd:
    case AlgorithmType::kSgld: {
      SgdConfig c;
      c.learning_rate = a.learning_rate;
      if (a.type == AlgorithmType::kSgld) {
        c.noise_std = a.noise_std ? *a.noise_std : sgld_noise_std(a.learning_rate, a.beta);
      }
      c.steps = a.steps;
      c.batch_size = a.batch_size;
      c.initial_point = x0;
      c.seed = seed;
      c.stream = stream;
      GradientDescent sampler(obj, c);
      auto json = c.to_json();
      json["label"] = a.label;
      return record_with(sampler, c.noise_std > 0.0 ? "sgld" : "sgd", std::move(json), a.steps,
                         schedule);
    }
  }
  throw std::invalid_argument("unknown algorithm type");
}

// Linear-regression data for one trial: train set from sample stream 0, test
// set from stream 1, sharing the true weights.
std::unique_ptr<Objective> linreg_for(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed,
                                      std::uint64_t sample_stream) {
  const auto domain = TorusDomain::from_json(cfg.objective.at("domain"));
  const auto d = cfg.objective.at("d").get<std::size_t>();
  const double noise = cfg.objective.value("noise", 0.0);
  return linreg_objective(domain, generate_linreg(n, d, noise, seed, sample_stream));
}

Vector state_at(const RunRecord& rec, std::size_t k) {
  if (k == rec.total_steps) return rec.final_theta;
  for (const auto& s : rec.steps) {
    if (s.k == k) return s.theta;
  }
  throw std::runtime_error("run record does not contain step " + std::to_string(k));
}

std::vector<Vector> pooled_states(const std::vector<RunRecord>& records, const std::vector<std::size_t>& ks) {
  std::vector<Vector> out;
  out.reserve(records.size() * ks.size());
  for (const auto& rec : records) {
    for (auto k : ks) out.push_back(state_at(rec, k));
  }
  return out;
}

/// Grid-normalized limit density of an algorithm cell.
GridDensity stationary_grid(const ExperimentConfig& cfg, const Objective& obj, const AlgorithmSpec& a,
                            double gradient_weight) {
  const StationaryDensity sd(obj, a.beta, a.epsilon, gradient_weight);
  return normalize_on_grid(sd, resolution_param(cfg.params, "grid_resolution", obj.dim(), 64),
                           cfg.params.value("subdivisions", std::size_t{4}));
}

double default_weight(const ExperimentConfig& cfg, const Objective& obj) {
  return cfg.params.value("gradient_weight", a_d(obj.dim()));
}

// ---------------------------------------------------------------------------

Analysis analyze_endpoints(const ExperimentData& data) {
  const auto& cfg = data.config;
  const auto obj = make_objective(cfg.objective);
  const bool classify = cfg.params.contains("global_min") && cfg.params.contains("local_min");
  Analysis out;
  out.summary.columns = {"algorithm", "trials", "mean_final_risk", "se_final_risk"};
  if (classify) {
    for (const char* c : {"global_count", "local_count", "global_fraction"}) out.summary.columns.push_back(c);
  }
  Vector global_min;
  Vector local_min;
  if (classify) {
    global_min = vector_from_json(cfg.params.at("global_min"));
    local_min = vector_from_json(cfg.params.at("local_min"));
  }
  for (std::size_t c = 0; c < data.cells.size(); ++c) {
    std::vector<double> risks;
    std::size_t global = 0;
    for (const auto& rec : data.records[c]) {
      risks.push_back(empirical_risk(*obj, rec.final_theta));
      if (classify && obj->domain().distance(rec.final_theta, global_min) <
                          obj->domain().distance(rec.final_theta, local_min)) {
        ++global;
      }
    }
    const auto m = estimate(risks);
    std::vector<nlohmann::json> row = {data.cells[c].name, risks.size(), m.mean, m.standard_error};
    if (classify) {
      row.push_back(global);
      row.push_back(risks.size() - global);
      row.push_back(static_cast<double>(global) / static_cast<double>(risks.size()));
    }
    out.summary.rows.push_back(std::move(row));
  }
  return out;
}

Analysis analyze_stationarity(const ExperimentData& data) {
  const auto& cfg = data.config;
  const auto obj = make_objective(cfg.objective);
  if (obj->dim() > 2) throw std::invalid_argument("stationarity experiments need d <= 2");
  const std::size_t window = window_for(cfg);
  const auto oracle_n = cfg.params.value("oracle_samples", std::size_t{20000});
  const auto n_proj = cfg.params.value("n_projections", std::size_t{64});
  const double weight = default_weight(cfg, *obj);

  Analysis out;
  out.summary.columns = {"algorithm", "beta",           "epsilon",        "checkpoint",
                         "samples",   "tv",             "tv_half_weight", "tv_noise_floor",
                         "sliced_w1", "oracle_samples", "ks_max",         "pooled_window"};
  for (std::size_t c = 0; c < data.cells.size(); ++c) {
    const auto& a = data.cells[c].algorithm;
    const StationaryDensity sd(*obj, a.beta, a.epsilon, weight);
    const auto grid = stationary_grid(cfg, *obj, a, weight);
    const auto grid_half = stationary_grid(cfg, *obj, a, 0.5 * a_d(obj->dim()));
    RngStream oracle_rng(cfg.seed, kOracleStream + c);
    const auto oracle = sample_stationary_oracle(sd, grid, oracle_n, oracle_rng);
    const auto cps = checkpoints_for(cfg, a);
    for (std::size_t j = 0; j < cps.size(); ++j) {
      const auto samples = pooled_states(data.records[c], window_steps(cps[j], window));
      RngStream noise_rng(cfg.seed, kNoiseFloorStream + 1000 * c + j);
      const auto reference = sample_stationary_oracle(sd, grid, samples.size(), noise_rng);
      RngStream proj_rng(cfg.seed, kProjectionStream + 1000 * c + j);
      double ks = 0.0;
      for (std::size_t axis = 0; axis < obj->dim(); ++axis) {
        std::vector<double> coord;
        coord.reserve(samples.size());
        for (const auto& s : samples) coord.push_back(s[static_cast<Eigen::Index>(axis)]);
        ks = std::max(ks, ks_statistic(coord, [&](double x) { return grid.marginal_cdf(axis, x); }));
      }
      out.summary.rows.push_back({data.cells[c].name, a.beta, a.epsilon, cps[j], samples.size(),
                                  histogram_tv(samples, grid), histogram_tv(samples, grid_half),
                                  histogram_tv(reference, grid),
                                  sliced_wasserstein1(samples, oracle, n_proj, proj_rng), oracle_n, ks,
                                  window > 1});
    }
  }
  out.notes["gradient_weight"] = weight;
  out.notes["diameter"] = obj->domain().diameter();
  out.notes["pooled_window"] = window > 1;
  if (window > 1) {
    out.notes["caveat"] =
        "each checkpoint pools " + std::to_string(window) +
        " states per chain from the second half of the run; samples within a chain are correlated";
  }
  return out;
}

Analysis analyze_beta_sweep(const ExperimentData& data) {
  const auto& cfg = data.config;
  const auto obj = make_objective(cfg.objective);
  const bool reference = obj->dim() <= 3 && cfg.params.value("reference", true);
  const auto res = resolution_param(cfg.params, "reference_resolution", obj->dim(),
                                    obj->dim() == 1 ? 1024 : 128);
  const auto sub = cfg.params.value("reference_subdivisions", std::size_t{2});
  const auto risk = [&](const Vector& x) { return empirical_risk(*obj, x); };

  Analysis out;
  out.summary.columns = {"beta",           "trials",
                         "mean_final_risk", "se_final_risk",
                         "std_final_risk",  "stationary_mean_risk",
                         "uniform_mean_risk"};
  nlohmann::json uniform_mean = nullptr;
  if (reference) {
    const StationaryDensity flat(*obj, 0.0, data.cells.front().algorithm.epsilon);
    uniform_mean = normalize_on_grid(flat, res, sub).expect(risk);
  }
  for (std::size_t c = 0; c < data.cells.size(); ++c) {
    const auto& a = data.cells[c].algorithm;
    std::vector<double> risks;
    for (const auto& rec : data.records[c]) risks.push_back(risk(rec.final_theta));
    const auto m = estimate(risks);
    nlohmann::json stationary_mean = nullptr;
    if (reference) {
      const StationaryDensity sd(*obj, a.beta, a.epsilon);
      stationary_mean = normalize_on_grid(sd, res, sub).expect(risk);
    }
    out.summary.rows.push_back({a.beta, risks.size(), m.mean, m.standard_error, sample_std(risks),
                                stationary_mean, uniform_mean});
  }
  return out;
}

Analysis analyze_coupling(const ExperimentData& data) {
  const auto& cfg = data.config;
  const auto n_proj = cfg.params.value("n_projections", std::size_t{256});
  Analysis out;
  out.summary.columns = {"epsilon", "steps", "trials", "sliced_w1"};
  for (std::size_t c = 0; c + 1 < data.cells.size(); c += 2) {
    const auto& a = data.cells[c].algorithm;
    const auto cps = checkpoints_for(cfg, a);
    for (std::size_t j = 0; j < cps.size(); ++j) {
      const auto psgd = pooled_states(data.records[c], {cps[j]});
      const auto bps = pooled_states(data.records[c + 1], {cps[j]});
      RngStream proj_rng(cfg.seed, kProjectionStream + 1000 * c + j);
      out.summary.rows.push_back(
          {a.epsilon, cps[j], psgd.size(), sliced_wasserstein1(psgd, bps, n_proj, proj_rng)});
    }
  }
  return out;
}

Analysis analyze_generalization(const ExperimentData& data) {
  const auto& cfg = data.config;
  const auto n_test = cfg.params.value("n_test", std::size_t{10000});
  std::vector<std::unique_ptr<Objective>> tests(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t t) { tests[t] = linreg_for(cfg, n_test, cfg.trial_seed(t), 1); });

  Analysis out;
  out.summary.columns = {"n", "beta", "trials", "train_risk", "test_risk", "gap", "gap_se"};
  for (std::size_t c = 0; c < data.cells.size(); ++c) {
    const auto n = data.cells[c].coords.at("n").get<std::size_t>();
    std::vector<double> train(cfg.trials);
    std::vector<double> test(cfg.trials);
    std::vector<double> gap(cfg.trials);
    parallel_for(cfg.trials, [&](std::size_t t) {
      const auto obj = linreg_for(cfg, n, cfg.trial_seed(t), 0);
      const auto& theta = data.records[c][t].final_theta;
      train[t] = empirical_risk(*obj, theta);
      test[t] = empirical_risk(*tests[t], theta);
      gap[t] = test[t] - train[t];
    });
    const auto g = estimate(gap);
    out.summary.rows.push_back({n, data.cells[c].algorithm.beta, cfg.trials, estimate(train).mean,
                                estimate(test).mean, g.mean, g.standard_error});
  }
  return out;
}

constexpr const char* kPlotScript = R"(# Plots the trajectory CSVs written next to this script.
# Usage: python3 plot_trajectories.py
import csv
import glob
import os

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
fig, ax = plt.subplots(figsize=(6, 4))
for path in sorted(glob.glob(os.path.join(here, "*.csv"))):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    if not rows or "theta2" not in rows[0]:
        continue
    xs = [float(r["theta1"]) for r in rows]
    ys = [float(r["theta2"]) for r in rows]
    ax.plot(xs, ys, lw=0.8, label=os.path.basename(path)[:-4])
    ax.plot(xs[0], ys[0], "o", color="green")
ax.plot([-3, 6], [0, 0], "x", color="black")
ax.set_xlabel("x")
ax.set_ylabel("y")
ax.legend(fontsize=6)
fig.tight_layout()
fig.savefig(os.path.join(here, "trajectories.png"), dpi=150)
)";

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_summary(const std::filesystem::path& dir, const Analysis& analysis) {
  std::ofstream csv(dir / "summary.csv", std::ios::binary);
  analysis.summary.write_csv(csv);
  if (!csv) throw std::runtime_error("cannot write summary.csv");
  const nlohmann::json j = {{"summary", analysis.summary.to_json()}, {"notes", analysis.notes}};
  write_text(dir / "summary.json", j.dump(2) + "\n");
}

}  // namespace

std::vector<Cell> experiment_cells(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Cell> cells;
  const AlgorithmSpec& tmpl = cfg.algorithms.front();
  switch (cfg.kind) {
    case ExperimentKind::kEscape:
    case ExperimentKind::kBaseline:
    case ExperimentKind::kStationarity:
      for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
        cells.push_back({cfg.algorithms[i].label, cfg.algorithms[i], i, nlohmann::json::object()});
      }
      break;
    case ExperimentKind::kBetaSweep: {
      const auto betas = cfg.params.at("betas").get<std::vector<double>>();
      for (std::size_t c = 0; c < betas.size(); ++c) {
        AlgorithmSpec a = tmpl;
        a.beta = betas[c];
        cells.push_back({"beta_" + fmt(betas[c]), a, 64 * c, {{"beta", betas[c]}}});
      }
      break;
    }
    case ExperimentKind::kCoupling: {
      const auto eps = list_param<double>(cfg.params, "epsilons", {tmpl.epsilon});
      for (std::size_t c = 0; c < eps.size(); ++c) {
        AlgorithmSpec p = tmpl;
        p.type = AlgorithmType::kPoissonSgd;
        p.label = "poisson_sgd";
        p.epsilon = eps[c];
        AlgorithmSpec b = p;
        b.type = AlgorithmType::kBps;
        b.label = "bps";
        const auto prefix = "eps_" + fmt(eps[c]) + "__";
        cells.push_back({prefix + p.label, p, 64 * c, {{"epsilon", eps[c]}}});
        cells.push_back({prefix + b.label, b, 64 * c + 1, {{"epsilon", eps[c]}}});
      }
      break;
    }
    case ExperimentKind::kGeneralization: {
      const auto ns = cfg.params.at("ns").get<std::vector<std::size_t>>();
      const auto betas = list_param<double>(cfg.params, "betas", {tmpl.beta});
      std::size_t c = 0;
      for (auto n : ns) {
        for (double b : betas) {
          AlgorithmSpec a = tmpl;
          a.beta = b;
          cells.push_back({"n_" + std::to_string(n) + "__beta_" + fmt(b), a, 64 * c++,
                           {{"n", n}, {"beta", b}}});
        }
      }
      break;
    }
  }
  return cells;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("PSGD_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long n = std::strtoull(env, &end, 10);
    if (*end != '\0' || n == 0) throw std::invalid_argument("PSGD_WORKERS must be a positive integer");
    return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ExperimentData run_trials(const ExperimentConfig& cfg) {
  ExperimentData data;
  data.config = cfg;
  data.cells = experiment_cells(cfg);
  data.records.assign(data.cells.size(), std::vector<RunRecord>(cfg.trials));
  const auto domain = TorusDomain::from_json(cfg.objective.at("domain"));
  const bool per_trial_objective = cfg.kind == ExperimentKind::kGeneralization;
  std::unique_ptr<Objective> shared;
  if (!per_trial_objective) shared = make_objective(cfg.objective);

  std::vector<Schedule> schedules;
  for (const auto& cell : data.cells) schedules.push_back(schedule_for(cfg, cell.algorithm));

  parallel_for(cfg.trials, [&](std::size_t t) {
    const auto seed = cfg.trial_seed(t);
    RngStream init(seed, ExperimentConfig::kInitStream);
    const Vector x0 = cfg.initial_point.uniform ? domain.sample_uniform(init) : cfg.initial_point.value;
    const Vector v0 =
        cfg.initial_velocity.uniform ? uniform_sphere(domain.dim(), init) : cfg.initial_velocity.value;
    for (std::size_t c = 0; c < data.cells.size(); ++c) {
      const auto& cell = data.cells[c];
      std::unique_ptr<Objective> local;
      if (per_trial_objective) local = linreg_for(cfg, cell.coords.at("n").get<std::size_t>(), seed, 0);
      const Objective& obj = per_trial_objective ? *local : *shared;
      data.records[c][t] = run_algorithm(obj, cell.algorithm, x0, v0, seed, cell.stream, schedules[c]);
    }
  });
  return data;
}

Analysis analyze(const ExperimentData& data) {
  switch (data.config.kind) {
    case ExperimentKind::kEscape:
      if (!data.config.params.contains("global_min") || !data.config.params.contains("local_min")) {
        throw std::invalid_argument("escape experiments need params.global_min and params.local_min");
      }
      return analyze_endpoints(data);
    case ExperimentKind::kBaseline:
      return analyze_endpoints(data);
    case ExperimentKind::kStationarity:
      return analyze_stationarity(data);
    case ExperimentKind::kBetaSweep:
      return analyze_beta_sweep(data);
    case ExperimentKind::kCoupling:
      return analyze_coupling(data);
    case ExperimentKind::kGeneralization:
      return analyze_generalization(data);
  }
  throw std::invalid_argument("unknown experiment kind");
}

void persist(const ExperimentData& data, const Analysis& analysis, const std::filesystem::path& dir) {
  const auto& cfg = data.config;
  std::filesystem::create_directories(dir / "records");
  write_text(dir / "config.json", cfg.to_json().dump(2) + "\n");
  for (std::size_t c = 0; c < data.cells.size(); ++c) {
    std::ofstream out(dir / "records" / (data.cells[c].name + ".ndjson"), std::ios::binary);
    for (const auto& rec : data.records[c]) rec.write_ndjson(out);
    if (!out) throw std::runtime_error("cannot write records for " + data.cells[c].name);
  }
  write_summary(dir, analysis);

  if (cfg.kind == ExperimentKind::kEscape || cfg.kind == ExperimentKind::kBaseline) {
    const auto traj = dir / "trajectories";
    std::filesystem::create_directories(traj);
    const auto n = std::min(cfg.trials, cfg.params.value("trajectory_trials", std::size_t{3}));
    for (std::size_t c = 0; c < data.cells.size(); ++c) {
      for (std::size_t t = 0; t < n; ++t) {
        std::ofstream out(traj / (data.cells[c].name + "_trial" + std::to_string(t) + ".csv"),
                          std::ios::binary);
        data.records[c][t].write_csv(out);
      }
    }
    write_text(traj / "plot_trajectories.py", kPlotScript);
  }
  if (cfg.kind == ExperimentKind::kStationarity) {
    const auto obj = make_objective(cfg.objective);
    for (const auto& cell : data.cells) {
      std::ofstream out(dir / ("grid_" + cell.name + ".csv"), std::ios::binary);
      stationary_grid(cfg, *obj, cell.algorithm, default_weight(cfg, *obj)).write_csv(out);
    }
  }
}

ExperimentData load_run(const std::filesystem::path& dir) {
  std::ifstream cfg_in(dir / "config.json");
  if (!cfg_in) throw std::runtime_error("no config.json in " + dir.string());
  ExperimentData data;
  data.config = ExperimentConfig::from_json(nlohmann::json::parse(cfg_in));
  data.cells = experiment_cells(data.config);
  for (const auto& cell : data.cells) {
    std::ifstream in(dir / "records" / (cell.name + ".ndjson"));
    if (!in) throw std::runtime_error("missing records for " + cell.name);
    auto recs = RunRecord::read_all_ndjson(in);
    if (recs.size() != data.config.trials) {
      throw std::runtime_error("records for " + cell.name + " do not cover every trial");
    }
    data.records.push_back(std::move(recs));
  }
  return data;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool persisted = !cfg.output_dir.empty();
  const std::filesystem::path dir(cfg.output_dir);
  if (persisted) write_manifest(dir, cfg);
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.data = run_trials(cfg);
  outcome.analysis = analyze(outcome.data);
  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (persisted) {
    persist(outcome.data, outcome.analysis, dir);
    const nlohmann::json timing = {{"wall_seconds", outcome.wall_seconds}, {"workers", worker_count()}};
    write_text(dir / "timing.json", timing.dump(2) + "\n");
  }
  return outcome;
}

Analysis analyze_run_dir(const std::filesystem::path& dir) {
  const auto data = load_run(dir);
  const auto manifest = read_manifest(dir);
  if (manifest.value("config_hash", std::string()) != config_hash(data.config)) {
    throw ManifestConflict("config.json in " + dir.string() + " does not match its manifest");
  }
  auto analysis = analyze(data);
  write_summary(dir, analysis);
  return analysis;
}

}  // namespace psgd::harness
