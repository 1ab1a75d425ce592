#include "psgd/bps.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "psgd/metrics.hpp"

namespace psgd {

BpsConfig BpsConfig::coupled_with(const Objective& obj, double beta, double epsilon, double c_b) {
  BpsConfig c;
  c.beta = beta;
  c.epsilon = epsilon;
  c.c_b = c_b;
  c.lambda_ref = beta * obj.grad_norm_bound() + 1.0 / epsilon - c_b;
  c.coupled = true;
  return c;
}

void BpsConfig::validate(const Objective& obj) const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  if (!(lambda_ref > 0.0) || !std::isfinite(lambda_ref)) {
    throw std::invalid_argument("lambda_ref must be strictly positive");
  }
  if (!(c_b >= 0.0) || !std::isfinite(c_b)) throw std::invalid_argument("c_b must be >= 0");
  if (coupled) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    const double target = beta * obj.grad_norm_bound() + 1.0 / epsilon;
    if (std::abs(lambda_ref + c_b - target) > 1e-12 * target) {
      throw std::invalid_argument("coupled BPS requires lambda_ref + c_b = beta M + 1/epsilon");
    }
  }
  if (record_stride == 0) throw std::invalid_argument("record stride must be positive");
  require_dim(obj.dim(), initial_point.size());
  require_dim(obj.dim(), initial_velocity.size());
  if (!obj.domain().contains(initial_point)) {
    throw std::invalid_argument("initial point lies outside the domain box");
  }
  if (std::abs(initial_velocity.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("initial velocity must be a unit vector");
  }
}

nlohmann::json BpsConfig::to_json() const {
  return {{"beta", beta},
          {"lambda_ref", lambda_ref},
          {"c_b", c_b},
          {"epsilon", epsilon},
          {"coupled", coupled},
          {"steps", steps},
          {"initial_point", vector_to_json(initial_point)},
          {"initial_velocity", vector_to_json(initial_velocity)},
          {"seed", seed},
          {"stream", stream},
          {"record_stride", record_stride}};
}

BpsConfig BpsConfig::from_json(const nlohmann::json& j) {
  BpsConfig c;
  c.beta = j.at("beta").get<double>();
  c.lambda_ref = j.at("lambda_ref").get<double>();
  c.c_b = j.value("c_b", 0.0);
  c.epsilon = j.value("epsilon", 1.0);
  c.coupled = j.value("coupled", false);
  c.steps = j.at("steps").get<std::size_t>();
  c.initial_point = vector_from_json(j.at("initial_point"));
  c.initial_velocity = vector_from_json(j.at("initial_velocity"));
  c.seed = j.value("seed", std::uint64_t{0});
  c.stream = j.value("stream", std::uint64_t{0});
  c.record_stride = j.value("record_stride", std::size_t{1});
  return c;
}

double reflection_probability(double beta, double slope, double lambda_ref, double c_b) {
  const double push = beta * (slope > 0.0 ? slope : 0.0) + c_b;
  return push / (push + lambda_ref);
}

BouncyParticleSampler::BouncyParticleSampler(const Objective& obj, BpsConfig cfg)
    : obj_(obj),
      cfg_(std::move(cfg)),
      batch_(full_batch(obj.num_samples())),
      rate_(obj.domain(), cfg_.beta, cfg_.lambda_ref + cfg_.c_b, obj.grad_norm_bound(),
            BatchGradient(obj, batch_)),
      grad_(static_cast<Eigen::Index>(obj.dim())) {
  cfg_.validate(obj);
}

OptimizerState BouncyParticleSampler::initial_state() const {
  return OptimizerState{cfg_.initial_point, cfg_.initial_velocity, 0,
                        RngStream(cfg_.seed, cfg_.stream)};
}

double BouncyParticleSampler::move(OptimizerState& state) {
  rate_.reset(state.theta, state.velocity);
  const double eta = sample_ray_exponential(rate_, state.rng);
  state.theta += eta * state.velocity;
  obj_.domain().wrap_in_place(state.theta);
  BatchGradient(obj_, batch_)(state.theta, grad_);
  ++state.step;
  return eta;
}

VelocityEvent BouncyParticleSampler::update_velocity(OptimizerState& state) {
  last_p_ = reflection_probability(cfg_.beta, grad_.dot(state.velocity), cfg_.lambda_ref, cfg_.c_b);
  VelocityEvent event = VelocityEvent::kRefresh;
  if (state.rng.uniform() < last_p_) {
    event = reflect_in_place(state.velocity, grad_) ? VelocityEvent::kReflect
                                                    : VelocityEvent::kSkipped;
  } else {
    uniform_sphere(state.rng, state.velocity);
  }
  renormalize(state.velocity);
  return event;
}

VelocityEvent BouncyParticleSampler::advance(OptimizerState& state) {
  move(state);
  return update_velocity(state);
}

StepRecord BouncyParticleSampler::step(OptimizerState& state) {
  StepRecord rec;
  rec.eta = move(state);
  rec.grad_norm = grad_.norm();
  rec.event = update_velocity(state);
  rec.k = state.step;
  rec.theta = state.theta;
  rec.velocity = state.velocity;
  return rec;
}

RunRecord BouncyParticleSampler::run() {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.algorithm = "bps";
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

OptimizerState BouncyParticleSampler::run_final() {
  OptimizerState state = initial_state();
  for (std::size_t k = 0; k < cfg_.steps; ++k) advance(state);
  return state;
}

StepRecord bps_step(OptimizerState& state, const Objective& obj, const BpsConfig& cfg) {
  BouncyParticleSampler sampler(obj, cfg);
  return sampler.step(state);
}

RunRecord run_bps(const Objective& obj, const BpsConfig& cfg) {
  BouncyParticleSampler sampler(obj, cfg);
  return sampler.run();
}

CoupledCompareResult coupled_compare(const Objective& obj, double beta, double epsilon,
                                     std::size_t steps, std::size_t trials,
                                     const CoupledCompareOptions& options) {
  if (trials == 0) throw std::invalid_argument("coupled_compare needs at least one trial");
  CoupledCompareResult result;
  result.poisson_sgd_endpoints.reserve(trials);
  result.bps_endpoints.reserve(trials);
  const RngStream root(options.seed);

  PoissonSgdConfig pcfg;
  pcfg.beta = beta;
  pcfg.epsilon = epsilon;
  pcfg.steps = steps;
  pcfg.batch_size = options.batch_size;
  pcfg.initial_point = options.initial_point;
  pcfg.initial_velocity = options.initial_velocity;
  pcfg.seed = options.seed;

  BpsConfig bcfg = BpsConfig::coupled_with(obj, beta, epsilon, options.c_b);
  bcfg.steps = steps;
  bcfg.initial_point = options.initial_point;
  bcfg.initial_velocity = options.initial_velocity;
  bcfg.seed = options.seed;

  PoissonSgd psgd(obj, pcfg);
  BouncyParticleSampler bps(obj, bcfg);
  for (std::size_t t = 0; t < trials; ++t) {
    OptimizerState ps{options.initial_point, options.initial_velocity, 0, root.split(2 * t)};
    OptimizerState bs{options.initial_point, options.initial_velocity, 0, root.split(2 * t + 1)};
    for (std::size_t k = 0; k < steps; ++k) {
      psgd.advance(ps);
      bps.advance(bs);
    }
    result.poisson_sgd_endpoints.push_back(std::move(ps.theta));
    result.bps_endpoints.push_back(std::move(bs.theta));
  }
  RngStream proj_rng = root.split(UINT64_MAX);
  result.sliced_w1 = sliced_wasserstein1(result.poisson_sgd_endpoints, result.bps_endpoints,
                                         options.n_projections, proj_rng);
  return result;
}

}  // namespace psgd
