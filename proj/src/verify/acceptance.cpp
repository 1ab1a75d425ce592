#include "psgd/verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "psgd/bps.hpp"
#include "psgd/harness/experiments.hpp"
#include "psgd/metrics.hpp"
#include "psgd/poisson_sgd.hpp"
#include "psgd/sampler.hpp"
#include "psgd/stationary.hpp"

#ifndef PSGD_DEFAULT_CONFIG_DIR
#define PSGD_DEFAULT_CONFIG_DIR "configs"
#endif

namespace psgd::verify {

namespace {

using harness::ExperimentConfig;
using harness::Table;

/// Accumulates "key = value" fragments of a criterion's detail line.
class Detail {
 public:
  template <class T>
  Detail& add(const std::string& key, const T& value) {
    if (!first_) out_ << "; ";
    first_ = false;
    out_ << key << " = " << value;
    return *this;
  }
  Detail& text(const std::string& s) {
    if (!first_) out_ << "; ";
    first_ = false;
    out_ << s;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_{[] {
    std::ostringstream o;
    o << std::setprecision(4);
    return o;
  }()};
  bool first_ = true;
};

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ExperimentConfig load_config(const AcceptanceOptions& o, const std::string& name) {
  auto cfg = ExperimentConfig::load((o.config_dir / name).string());
  cfg.output_dir.clear();
  return cfg;
}

std::vector<std::size_t> rows_for(const Table& t, const std::string& column, const std::string& value) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.at(r, column) == value) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// P1

template <class Sampler>
double max_norm_deviation(Sampler& sampler, std::size_t steps) {
  auto state = sampler.initial_state();
  double worst = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    sampler.advance(state);
    worst = std::max(worst, std::abs(state.velocity.norm() - 1.0));
  }
  return worst;
}

CriterionResult velocity_norm(const AcceptanceOptions&) {
  constexpr std::size_t kSteps = 1'000'000;
  const auto dw = double_well_2d(TorusDomain({16.0, 16.0}, {-6.0, -8.0}));
  const Vector x0 = vec({-3.1, 0.2});
  const Vector v0 = vec({0.6, 0.8});

  PoissonSgdConfig p;
  p.beta = 0.03;
  p.epsilon = 0.2;
  p.steps = kSteps;
  p.initial_point = x0;
  p.initial_velocity = v0;
  p.seed = 11;
  PoissonSgd psgd(*dw, p);
  const double psgd_dev = max_norm_deviation(psgd, kSteps);

  BpsConfig b = BpsConfig::coupled_with(*dw, 0.03, 0.2);
  b.steps = kSteps;
  b.initial_point = x0;
  b.initial_velocity = v0;
  b.seed = 12;
  BouncyParticleSampler bps(*dw, b);
  const double bps_dev = max_norm_deviation(bps, kSteps);

  CriterionResult r;
  r.pass = psgd_dev <= 1e-9 && bps_dev <= 1e-9;
  r.detail = Detail()
                 .add("max |norm(v)-1| poisson_sgd", psgd_dev)
                 .add("bps", bps_dev)
                 .add("steps each", kSteps)
                 .add("tolerance", 1e-9)
                 .str();
  return r;
}

// ---------------------------------------------------------------------------
// P2

CriterionResult reflection_algebra(const AcceptanceOptions&) {
  RngStream rng(2024);
  double involution = 0.0;
  double norm = 0.0;
  double flip = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t d = 2 + rng.uniform_index(9);
    const Vector v = uniform_sphere(d, rng);
    Vector g(static_cast<Eigen::Index>(d));
    for (auto& x : g) x = rng.normal();
    g *= std::pow(10.0, 2.0 * rng.uniform() - 1.0);
    const Vector rv = reflect(v, g);
    involution = std::max(involution, (reflect(rv, g) - v).norm());
    norm = std::max(norm, std::abs(rv.norm() - v.norm()));
    flip = std::max(flip, std::abs(rv.dot(g) + v.dot(g)) / std::max(1.0, g.norm()));
  }
  CriterionResult r;
  r.pass = involution <= 1e-12 && norm <= 1e-12 && flip <= 1e-12;
  r.detail = Detail()
                 .add("max |R(Rv)-v|", involution)
                 .add("max |norm(Rv)-norm(v)|", norm)
                 .add("max |<Rv,g>+<v,g>|/max(1,|g|)", flip)
                 .add("pairs", 10000)
                 .str();
  return r;
}

// ---------------------------------------------------------------------------
// P3

struct ConstantField {
  Vector g;
  void operator()(const VectorRef&, Vector& out) const { out = g; }
};

// Gradient min(x, cap) along a ray from 0 with v = +1.
struct CappedLinearField {
  double cap;
  void operator()(const VectorRef& p, Vector& out) const {
    out.resize(1);
    out[0] = std::min(p[0], cap);
  }
};

template <class Rate>
std::vector<double> draw_thinning(const Rate& rate, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_ray_exponential(rate, rng);
  return out;
}

template <class Rate>
std::vector<double> draw_oracle(const Rate& rate, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_ray_exponential_oracle(rate, rng, 1e-9);
  return out;
}

double mean_eta(const Objective& obj, PoissonSgdConfig cfg, double& se) {
  cfg.record_stride = 1;
  const auto rec = run_poisson_sgd(obj, cfg);
  std::vector<double> etas;
  etas.reserve(rec.steps.size());
  for (const auto& s : rec.steps) etas.push_back(s.eta);
  const auto m = mean_with_se(etas);
  se = m.standard_error;
  return m.mean;
}

CriterionResult learning_rate_law(const AcceptanceOptions&) {
  constexpr std::size_t kDraws = 100000;
  Detail detail;
  bool pass = true;
  const TorusDomain line = TorusDomain::cube(1, 1000.0);
  const Vector base = vec({0.0});
  const Vector dir = vec({1.0});

  // Constant-rate cases: non-positive slope leaves the floor; positive constant slope adds to it.
  struct ConstantCase {
    double beta, floor, bound, slope, lambda;
  };
  double worst_ks = 0.0;
  std::uint64_t seed = 1;
  for (const auto& c : {ConstantCase{1.0, 10.0, 1.0, 0.0, 10.0}, ConstantCase{3.0, 1.0, 2.0, 2.0, 7.0},
                        ConstantCase{1.0, 4.0, 5.0, -5.0, 4.0}}) {
    RayRate rate(line, base, dir, c.beta, c.floor, c.bound, ConstantField{vec({c.slope})});
    const auto xs = draw_thinning(rate, kDraws, seed++);
    const double lambda = c.lambda;
    worst_ks = std::max(worst_ks, ks_statistic(xs, [lambda](double t) { return 1.0 - std::exp(-lambda * t); }));
  }
  pass = pass && worst_ks < 0.006;
  detail.add("max KS vs Exp(lambda)", worst_ks);

  double worst_w1 = 0.0;
  const auto compare = [&](const auto& rate, std::uint64_t s) {
    worst_w1 = std::max(worst_w1, wasserstein1_1d(draw_thinning(rate, kDraws, s),
                                                  draw_oracle(rate, kDraws, s + 1000)));
  };
  compare(RayRate(line, base, dir, 1.0, 10.0, 1.0, ConstantField{vec({0.0})}), 11);
  compare(RayRate(line, base, dir, 3.0, 1.0, 2.0, ConstantField{vec({2.0})}), 12);
  compare(RayRate(line, base, dir, 1.0, 4.0, 5.0, ConstantField{vec({-5.0})}), 13);
  compare(RayRate(line, base, dir, 1.0, 1.0, 5.0, CappedLinearField{5.0}), 14);
  {
    const auto dw = double_well_2d(TorusDomain({16.0, 16.0}, {-6.0, -8.0}));
    const MiniBatch batch = full_batch(1);
    compare(RayRate(dw->domain(), vec({-3.0, 0.5}), vec({1.0, 0.0}), 0.05, 20.0, dw->grad_norm_bound(),
                    BatchGradient(*dw, batch)),
            15);
  }
  pass = pass && worst_w1 < 1e-2;
  detail.add("max W1 thinning vs inverse-CDF (5 fields)", worst_w1);

  // Mean learning rate against 1/C_P = epsilon on the built-in objectives.
  struct EtaCase {
    std::unique_ptr<Objective> obj;
    double beta, epsilon;
    std::size_t batch;
  };
  std::vector<EtaCase> cases;
  cases.push_back({double_well_2d(TorusDomain({16.0, 16.0}, {-6.0, -8.0})), 0.03, 0.2, 0});
  cases.push_back({double_well_1d(TorusDomain({16.0}, {-6.0})), 0.01, 0.05, 0});
  cases.push_back({quadratic_bowl(TorusDomain::cube(2, 10.0, -5.0), {vec({1.0, 1.0}), vec({-2.0, 0.5})}),
                   1.0, 0.5, 1});
  cases.push_back({linreg_synthetic(TorusDomain::cube(3, 8.0, -4.0), 64, 3, 0.5, 9), 1.0, 0.1, 8});
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto& c = cases[i];
    PoissonSgdConfig cfg;
    cfg.beta = c.beta;
    cfg.epsilon = c.epsilon;
    cfg.steps = kDraws;
    cfg.batch_size = c.batch;
    cfg.initial_point = Vector::Zero(static_cast<Eigen::Index>(c.obj->dim()));
    if (c.obj->name() == "double_well_2d") cfg.initial_point = vec({-3.1, 0.2});
    cfg.initial_velocity = Vector::Zero(static_cast<Eigen::Index>(c.obj->dim()));
    cfg.initial_velocity[0] = 1.0;
    cfg.seed = 30 + i;
    double se = 0.0;
    const double m = mean_eta(*c.obj, cfg, se);
    pass = pass && m <= c.epsilon + 3.0 * se;
    worst_ratio = std::max(worst_ratio, m / c.epsilon);
  }
  detail.add("max mean(eta)/epsilon over 4 objectives", worst_ratio);
  CriterionResult r;
  r.pass = pass;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// P4, P5

int count_modes(const std::vector<double>& mass) {
  const std::size_t n = mass.size();
  int modes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = mass[(i + n - 1) % n];
    const double right = mass[(i + 1) % n];
    if (mass[i] > left && mass[i] >= right) ++modes;
  }
  return modes;
}

/// Decrease across checkpoints: the last value is below the first and at most
/// one step goes up, by no more than that checkpoint's sampling noise floor.
bool decreasing(const std::vector<double>& values, const std::vector<double>& noise) {
  int inversions = 0;
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    if (values[j + 1] > values[j]) {
      ++inversions;
      if (values[j + 1] - values[j] > noise[j + 1]) return false;
    }
  }
  return inversions <= 1 && values.back() < values.front();
}

std::string join(const std::vector<double>& xs) {
  std::ostringstream o;
  o << std::setprecision(3) << '[';
  for (std::size_t i = 0; i < xs.size(); ++i) o << (i ? ", " : "") << xs[i];
  o << ']';
  return o.str();
}

struct StationarityCheck {
  bool pass = false;
  std::string detail;
};

StationarityCheck bps_stationarity(const AcceptanceOptions& o, const std::string& file, bool need_modes) {
  const auto cfg = load_config(o, file);
  const auto outcome = harness::run_experiment(cfg);
  const auto& t = outcome.analysis.summary;
  std::vector<double> tv;
  std::vector<double> tv_half;
  std::vector<double> noise;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    tv.push_back(t.number(r, "tv"));
    tv_half.push_back(t.number(r, "tv_half_weight"));
    noise.push_back(t.number(r, "tv_noise_floor"));
  }
  const auto obj = make_objective(cfg.objective);
  const auto& a = cfg.algorithms.front();
  const auto grid = normalize_on_grid(StationaryDensity(*obj, a.beta, a.epsilon), {64});
  const int modes = count_modes(grid.mass);

  StationarityCheck c;
  c.pass = tv.back() < 0.05 && decreasing(tv, noise) && (!need_modes || modes >= 2);
  std::ostringstream d;
  d << std::setprecision(3) << obj->name() << ": TV@K=" << t.at(t.rows.size() - 1, "checkpoint").dump()
    << " " << tv.back() << " (noise floor " << noise.back() << ", half-weight variant " << tv_half.back()
    << "), TV by checkpoint " << join(tv) << ", grid modes " << modes << ", samples/checkpoint "
    << t.at(0, "samples").dump() << (outcome.analysis.notes.value("pooled_window", false) ? " [pooled window]" : "");
  c.detail = d.str();
  return c;
}

CriterionResult bps_stationarity_all(const AcceptanceOptions& o) {
  const auto q = bps_stationarity(o, "acceptance/stationarity_quadratic.json", false);
  const auto dw = bps_stationarity(o, "acceptance/stationarity_double_well.json", true);
  CriterionResult r;
  r.pass = q.pass && dw.pass;
  r.detail = q.detail + " | " + dw.detail;
  return r;
}

CriterionResult poisson_sgd_stationarity(const AcceptanceOptions& o) {
  const auto cfg = load_config(o, "acceptance/stationarity_poisson_sgd.json");
  const auto outcome = harness::run_experiment(cfg);
  const auto& t = outcome.analysis.summary;
  const double diameter = outcome.analysis.notes.at("diameter").get<double>();
  std::vector<double> w1;
  for (std::size_t r = 0; r < t.rows.size(); ++r) w1.push_back(t.number(r, "sliced_w1"));
  const std::size_t last = t.rows.size() - 1;
  CriterionResult r;
  r.pass = w1.back() < 0.1 * diameter;
  r.detail = Detail()
                 .add("sliced W1 vs oracle at K=" + t.at(last, "checkpoint").dump(), w1.back())
                 .add("threshold 0.1*diam", 0.1 * diameter)
                 .add("W1 by checkpoint", join(w1))
                 .add("TV at K", t.number(last, "tv"))
                 .add("chains", t.at(last, "samples").dump())
                 .str();
  return r;
}

// ---------------------------------------------------------------------------
// P6

CriterionResult marginal_constant(const AcceptanceOptions&) {
  const double err = std::max({std::abs(a_d(1) - 1.0), std::abs(a_d(2) - 2.0 / std::numbers::pi),
                               std::abs(a_d(3) - 0.5)});
  bool pass = err <= 1e-12;
  double worst_z = 0.0;
  int outside_bracket = 0;
  RngStream rng(6);
  for (std::size_t d = 2; d <= 10; ++d) {
    const auto e = cos_plus_expectation_check(d, 1'000'000, rng);
    const double z = std::abs(e.mean - e.exact) / e.standard_error;
    worst_z = std::max(worst_z, z);
    if (z > 4.0) pass = false;
    if (e.mean < e.bracket_low || e.mean > e.bracket_high) {
      ++outside_bracket;
      pass = false;
    }
  }
  CriterionResult r;
  r.pass = pass;
  r.detail = Detail()
                 .add("max |a_d - closed form| (d=1,2,3)", err)
                 .add("max |MC - a_d/2| in SE (d=2..10)", worst_z)
                 .add("estimates outside bracket", outside_bracket)
                 .str();
  return r;
}

// ---------------------------------------------------------------------------
// P7

/// Random smooth rate c + sum_k a_k sin(w_k t + phi_k).
struct TrigRate {
  double offset = 0.0;
  std::vector<double> amp, freq, phase;

  double operator()(double t) const {
    double f = offset;
    for (std::size_t k = 0; k < amp.size(); ++k) f += amp[k] * std::sin(freq[k] * t + phase[k]);
    return f;
  }
  double amplitude() const {
    double s = 0.0;
    for (double a : amp) s += std::abs(a);
    return s;
  }
};

TrigRate random_trig(RngStream& rng, double offset, double max_amplitude) {
  TrigRate f;
  f.offset = offset;
  for (int k = 0; k < 3; ++k) {
    f.amp.push_back(max_amplitude / 3.0 * rng.uniform());
    f.freq.push_back(0.2 + 3.0 * rng.uniform());
    f.phase.push_back(2.0 * std::numbers::pi * rng.uniform());
  }
  return f;
}

CriterionResult wasserstein_lemma(const AcceptanceOptions&) {
  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(0.01 * i);
  RngStream rng(7);
  int passed = 0;
  double worst_ratio = 0.0;
  constexpr int kPairs = 100;
  for (int p = 0; p < kPairs; ++p) {
    // f1 in [1, 2]; f2 = f1 + delta with |delta| <= M <= 0.5.
    const TrigRate f1 = random_trig(rng, 1.5, 0.5);
    const TrigRate delta = random_trig(rng, 0.0, 0.5);
    const auto f2 = [&](double t) { return f1(t) + delta(t); };
    const double M = delta.amplitude();
    const double m1 = f1.offset - f1.amplitude();
    const double m2 = m1 - M;
    const auto res = lemma_wasserstein_bound_check(f1, f2, grid, M, m1, m2, 2000, rng);
    if (res.pass) ++passed;
    worst_ratio = std::max(worst_ratio, res.measured_w1 / res.bound);
  }
  const auto tight = lemma_wasserstein_bound_check([](double) { return 1.0; }, [](double) { return 2.0; },
                                                   grid, 1.0, 1.0, 2.0, 20000, rng);
  CriterionResult r;
  r.pass = passed == kPairs && std::abs(tight.measured_w1 - 0.5) <= 0.01 && tight.pass;
  r.detail = Detail()
                 .add("random pairs within bound", std::to_string(passed) + "/" + std::to_string(kPairs))
                 .add("max measured/bound", worst_ratio)
                 .add("constant rates 1 vs 2: W1", tight.measured_w1)
                 .add("bound", tight.bound)
                 .str();
  return r;
}

// ---------------------------------------------------------------------------
// P8

CriterionResult escape(const AcceptanceOptions& o) {
  const auto cfg = load_config(o, "acceptance/escape.json");
  const auto outcome = harness::run_experiment(cfg);
  const auto& t = outcome.analysis.summary;
  const auto sgd = rows_for(t, "algorithm", "sgd");
  const auto psgd = rows_for(t, "algorithm", "poisson_sgd");
  if (sgd.size() != 1 || psgd.size() != 1) throw std::runtime_error("escape config needs sgd and poisson_sgd");
  const auto sgd_global = t.at(sgd[0], "global_count").get<std::size_t>();
  const auto psgd_global = t.at(psgd[0], "global_count").get<std::size_t>();
  const auto trials = t.at(psgd[0], "trials").get<std::size_t>();
  const auto& p = cfg.algorithms[1];
  CriterionResult r;
  r.pass = sgd_global == 0 && psgd_global * 100 >= 80 * trials;
  std::ostringstream d;
  d << "plain SGD global " << sgd_global << "/" << trials << ", Poisson SGD global " << psgd_global << "/"
    << trials << " (beta " << p.beta << ", eps " << p.epsilon << ", K " << p.steps
    << "); mean final risk sgd " << std::setprecision(4) << t.number(sgd[0], "mean_final_risk")
    << ", poisson_sgd " << t.number(psgd[0], "mean_final_risk");
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// P9

CriterionResult beta_sweep(const AcceptanceOptions& o) {
  const auto cfg = load_config(o, "acceptance/beta_sweep.json");
  const auto outcome = harness::run_experiment(cfg);
  const auto& t = outcome.analysis.summary;
  std::vector<double> means;
  std::vector<double> ses;
  std::vector<double> betas;
  bool zero_ok = false;
  std::string zero_detail = "no beta = 0 row";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double beta = t.number(r, "beta");
    const double m = t.number(r, "mean_final_risk");
    const double se = t.number(r, "se_final_risk");
    if (beta == 0.0) {
      const double u = t.number(r, "uniform_mean_risk");
      zero_ok = std::abs(m - u) <= 2.0 * se;
      std::ostringstream d;
      d << std::setprecision(4) << "beta=0 mean " << m << " +- " << se << " vs uniform-law " << u;
      zero_detail = d.str();
    } else {
      betas.push_back(beta);
      means.push_back(m);
      ses.push_back(se);
    }
  }
  int inversions = 0;
  bool within = true;
  for (std::size_t j = 0; j + 1 < means.size(); ++j) {
    if (!(means[j + 1] < means[j])) {
      ++inversions;
      if (means[j + 1] - means[j] > 2.0 * std::hypot(ses[j], ses[j + 1])) within = false;
    }
  }
  std::ostringstream d;
  d << std::setprecision(4) << "betas " << join(betas) << " mean risk " << join(means) << " se " << join(ses)
    << ", inversions " << inversions << (within ? "" : " (beyond 2 SE)") << "; " << zero_detail;
  CriterionResult r;
  r.pass = means.size() >= 2 && inversions <= 1 && within && zero_ok;
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// P10

CriterionResult generalization(const AcceptanceOptions& o) {
  const auto cfg = load_config(o, "acceptance/generalization.json");
  const auto outcome = harness::run_experiment(cfg);
  const auto& t = outcome.analysis.summary;
  std::vector<double> ns;
  std::vector<double> gaps;
  std::vector<double> ses;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ns.push_back(t.number(r, "n"));
    gaps.push_back(t.number(r, "gap"));
    ses.push_back(t.number(r, "gap_se"));
  }
  bool pass = gaps.size() >= 2;
  for (std::size_t j = 0; j + 1 < gaps.size(); ++j) {
    if (gaps[j + 1] > gaps[j] + 2.0 * std::hypot(ses[j], ses[j + 1])) pass = false;
  }
  std::ostringstream d;
  d << std::setprecision(4) << "n " << join(ns) << " gap " << join(gaps) << " se " << join(ses);
  CriterionResult r;
  r.pass = pass;
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// P11

std::vector<std::filesystem::path> output_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "timing.json") {
      out.push_back(std::filesystem::relative(e.path(), dir));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CriterionResult determinism(const AcceptanceOptions& o) {
  if (o.work_dir.empty()) throw std::invalid_argument("determinism check needs a work directory");
  std::vector<std::filesystem::path> configs;
  for (const auto& e : std::filesystem::directory_iterator(o.config_dir / "smoke")) {
    if (e.path().extension() == ".json") configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  std::size_t files = 0;
  std::vector<std::string> mismatches;
  std::vector<std::string> kinds;
  for (const auto& path : configs) {
    auto cfg = ExperimentConfig::load(path.string());
    kinds.push_back(harness::to_string(cfg.kind));
    std::vector<std::filesystem::path> dirs;
    for (const char* run : {"a", "b"}) {
      const auto dir = o.work_dir / run / path.stem();
      std::filesystem::remove_all(dir);
      cfg.output_dir = dir.string();
      harness::run_experiment(cfg);
      dirs.push_back(dir);
    }
    const auto fa = output_files(dirs[0]);
    const auto fb = output_files(dirs[1]);
    if (fa != fb) {
      mismatches.push_back(path.stem().string() + ": file sets differ");
      continue;
    }
    for (const auto& f : fa) {
      ++files;
      if (slurp(dirs[0] / f) != slurp(dirs[1] / f)) mismatches.push_back((path.stem() / f).string());
    }
  }
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  CriterionResult r;
  r.pass = mismatches.empty() && kinds.size() == 6;
  std::ostringstream d;
  d << configs.size() << " configs covering " << kinds.size() << "/6 experiment kinds rerun; " << files
    << " output files compared, " << mismatches.size() << " differ";
  if (!mismatches.empty()) d << " (first: " << mismatches.front() << ")";
  r.detail = d.str();
  return r;
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"P1", "velocity-norm invariant", velocity_norm},
      {"P2", "reflection algebra", reflection_algebra},
      {"P3", "learning-rate law", learning_rate_law},
      {"P4", "BPS stationarity against the limit density", bps_stationarity_all},
      {"P5", "Poisson SGD stationarity", poisson_sgd_stationarity},
      {"P6", "a_d and E[(v_1)_+]", marginal_constant},
      {"P7", "1-D Wasserstein lemma", wasserstein_lemma},
      {"P8", "escape from the local minimum", escape},
      {"P9", "global-convergence direction in beta", beta_sweep},
      {"P10", "generalization-gap direction in n", generalization},
      {"P11", "byte-for-byte determinism", determinism},
  };
  return all;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<std::string>& only,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.run(options);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.id = c.id;
    r.title = c.title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream o;
  o << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.title << " (" << std::fixed << std::setprecision(1)
    << r.seconds << "s): " << r.detail;
  return o.str();
}

std::filesystem::path default_config_dir() { return PSGD_DEFAULT_CONFIG_DIR; }

}  // namespace psgd::verify
