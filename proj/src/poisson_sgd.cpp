#include "psgd/poisson_sgd.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace psgd {

Vector reflect(const VectorRef& v, const VectorRef& g) {
  Vector out = v;
  reflect_in_place(out, g);
  return out;
}

bool reflect_in_place(Vector& v, const VectorRef& g) {
  require_dim(static_cast<std::size_t>(v.size()), g.size());
  const double g_sq = g.squaredNorm();
  if (!(std::sqrt(g_sq) >= kZeroGradientNorm)) return false;
  v -= (2.0 * g.dot(v) / g_sq) * g;
  return true;
}

void renormalize(Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw std::logic_error("cannot renormalize a zero velocity");
  v /= norm;
}

namespace {

void check_unit(const Vector& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " must be a unit vector");
  }
}

}  // namespace

void PoissonSgdConfig::validate(const Objective& obj) const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be > 0");
  if (batch_size > obj.num_samples()) throw std::invalid_argument("batch size exceeds dataset size");
  if (record_stride == 0) throw std::invalid_argument("record stride must be positive");
  require_dim(obj.dim(), initial_point.size());
  require_dim(obj.dim(), initial_velocity.size());
  if (!obj.domain().contains(initial_point)) {
    throw std::invalid_argument("initial point lies outside the domain box");
  }
  check_unit(initial_velocity, "initial velocity");
}

nlohmann::json PoissonSgdConfig::to_json() const {
  return {{"beta", beta},
          {"epsilon", epsilon},
          {"c_p", c_p()},
          {"steps", steps},
          {"batch_size", batch_size},
          {"initial_point", vector_to_json(initial_point)},
          {"initial_velocity", vector_to_json(initial_velocity)},
          {"seed", seed},
          {"stream", stream},
          {"record_stride", record_stride}};
}

PoissonSgdConfig PoissonSgdConfig::from_json(const nlohmann::json& j) {
  PoissonSgdConfig c;
  c.beta = j.at("beta").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("c_p") && std::abs(j.at("c_p").get<double>() - c.c_p()) > 1e-12 * c.c_p()) {
    throw std::invalid_argument("c_p is derived as 1/epsilon and cannot be set independently");
  }
  c.steps = j.at("steps").get<std::size_t>();
  c.batch_size = j.value("batch_size", std::size_t{0});
  c.initial_point = vector_from_json(j.at("initial_point"));
  c.initial_velocity = vector_from_json(j.at("initial_velocity"));
  c.seed = j.value("seed", std::uint64_t{0});
  c.stream = j.value("stream", std::uint64_t{0});
  c.record_stride = j.value("record_stride", std::size_t{1});
  return c;
}

PoissonSgd::PoissonSgd(const Objective& obj, PoissonSgdConfig cfg)
    : obj_(obj),
      cfg_(std::move(cfg)),
      batch_size_(cfg_.batch_size == 0 ? obj.num_samples() : cfg_.batch_size),
      batch_(full_batch(obj.num_samples())),
      rate_(obj.domain(), cfg_.beta, cfg_.c_p(), obj.grad_norm_bound(), BatchGradient(obj, batch_)),
      grad_(static_cast<Eigen::Index>(obj.dim())) {
  cfg_.validate(obj);
}

OptimizerState PoissonSgd::initial_state() const {
  return OptimizerState{cfg_.initial_point, cfg_.initial_velocity, 0,
                        RngStream(cfg_.seed, cfg_.stream)};
}

double PoissonSgd::transition(OptimizerState& state) {
  if (batch_size_ != obj_.num_samples()) {
    batch_ = sample_minibatch(obj_.num_samples(), batch_size_, state.rng);
  }
  rate_.reset(state.theta, state.velocity);
  const double eta = sample_ray_exponential(rate_, state.rng);
  state.theta += eta * state.velocity;
  obj_.domain().wrap_in_place(state.theta);
  BatchGradient(obj_, batch_)(state.theta, grad_);
  ++state.step;
  return eta;
}

void PoissonSgd::advance(OptimizerState& state) {
  transition(state);
  reflect_in_place(state.velocity, grad_);
  renormalize(state.velocity);
}

StepRecord PoissonSgd::step(OptimizerState& state) {
  StepRecord rec;
  rec.eta = transition(state);
  rec.event = reflect_in_place(state.velocity, grad_) ? VelocityEvent::kReflect
                                                      : VelocityEvent::kSkipped;
  renormalize(state.velocity);
  rec.k = state.step;
  rec.theta = state.theta;
  rec.velocity = state.velocity;
  rec.batch = batch_.indices;
  rec.grad_norm = grad_.norm();
  return rec;
}

RunRecord PoissonSgd::run() {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.algorithm = "poisson_sgd";
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
  record.final_velocity = state.velocity;
  record.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

OptimizerState PoissonSgd::run_final() {
  OptimizerState state = initial_state();
  for (std::size_t k = 0; k < cfg_.steps; ++k) advance(state);
  return state;
}

StepRecord poisson_sgd_step(OptimizerState& state, const Objective& obj, const PoissonSgdConfig& cfg) {
  PoissonSgd stepper(obj, cfg);
  return stepper.step(state);
}

RunRecord run_poisson_sgd(const Objective& obj, const PoissonSgdConfig& cfg) {
  PoissonSgd stepper(obj, cfg);
  return stepper.run();
}

}  // namespace psgd
