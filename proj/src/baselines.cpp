#include "psgd/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace psgd {

void SgdConfig::validate(const Objective& obj) const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("noise_std must be nonnegative");
  if (batch_size > obj.num_samples()) throw std::invalid_argument("batch size exceeds dataset size");
  if (record_stride == 0) throw std::invalid_argument("record stride must be positive");
  require_dim(obj.dim(), initial_point.size());
  if (!obj.domain().contains(initial_point)) {
    throw std::invalid_argument("initial point lies outside the domain box");
  }
}

nlohmann::json SgdConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"noise_std", noise_std},
          {"steps", steps},
          {"batch_size", batch_size},
          {"initial_point", vector_to_json(initial_point)},
          {"seed", seed},
          {"stream", stream},
          {"record_stride", record_stride}};
}

SgdConfig SgdConfig::from_json(const nlohmann::json& j) {
  SgdConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.noise_std = j.value("noise_std", 0.0);
  c.steps = j.at("steps").get<std::size_t>();
  c.batch_size = j.value("batch_size", std::size_t{0});
  c.initial_point = vector_from_json(j.at("initial_point"));
  c.seed = j.value("seed", std::uint64_t{0});
  c.stream = j.value("stream", std::uint64_t{0});
  c.record_stride = j.value("record_stride", std::size_t{1});
  return c;
}

double sgld_noise_std(double learning_rate, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("SGLD needs beta > 0");
  return std::sqrt(2.0 * learning_rate / beta);
}

GradientDescent::GradientDescent(const Objective& obj, SgdConfig cfg)
    : obj_(obj),
      cfg_(std::move(cfg)),
      batch_size_(cfg_.batch_size == 0 ? obj.num_samples() : cfg_.batch_size),
      batch_(full_batch(obj.num_samples())),
      grad_(static_cast<Eigen::Index>(obj.dim())) {
  cfg_.validate(obj);
}

OptimizerState GradientDescent::initial_state() const {
  return OptimizerState{cfg_.initial_point, Vector(), 0, RngStream(cfg_.seed, cfg_.stream)};
}

void GradientDescent::advance(OptimizerState& state) {
  if (batch_size_ != obj_.num_samples()) {
    batch_ = sample_minibatch(obj_.num_samples(), batch_size_, state.rng);
  }
  BatchGradient(obj_, batch_)(state.theta, grad_);
  state.theta -= cfg_.learning_rate * grad_;
  if (cfg_.noise_std > 0.0) {
    for (Eigen::Index i = 0; i < state.theta.size(); ++i) {
      state.theta[i] += cfg_.noise_std * state.rng.normal();
    }
  }
  obj_.domain().wrap_in_place(state.theta);
  ++state.step;
}

StepRecord GradientDescent::step(OptimizerState& state) {
  advance(state);
  StepRecord rec;
  rec.k = state.step;
  rec.theta = state.theta;
  rec.velocity = Vector();
  rec.eta = cfg_.learning_rate;
  rec.batch = batch_.indices;
  rec.grad_norm = grad_.norm();
  rec.event = VelocityEvent::kSkipped;
  return rec;
}

RunRecord GradientDescent::run() {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.algorithm = cfg_.noise_std > 0.0 ? "sgld" : "sgd";
  record.config = cfg_.to_json();
  record.rng_algorithm = std::string(RngStream::kAlgorithm);
  record.seed = cfg_.seed;
  record.stream = cfg_.stream;
  record.total_steps = cfg_.steps;
  record.stride = cfg_.record_stride;
  OptimizerState state = initial_state();
  for (std::size_t k = 1; k <= cfg_.steps; ++k) {
    if (k % cfg_.record_stride == 0 || k == cfg_.steps) {
      record.steps.push_back(step(state));
    } else {
      advance(state);
    }
  }
  record.final_theta = state.theta;
  record.final_velocity = Vector();
  record.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

OptimizerState GradientDescent::run_final() {
  OptimizerState state = initial_state();
  for (std::size_t k = 0; k < cfg_.steps; ++k) advance(state);
  return state;
}

RunRecord run_sgd(const Objective& obj, const SgdConfig& cfg) {
  GradientDescent gd(obj, cfg);
  return gd.run();
}

}  // namespace psgd
