#include "psgd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "psgd/rng.hpp"

namespace psgd {

Objective::Objective(TorusDomain domain, double grad_norm_bound, ObjectiveMetadata metadata)
    : domain_(std::move(domain)), grad_norm_bound_(grad_norm_bound), metadata_(metadata) {
  if (!(grad_norm_bound_ > 0.0) || !std::isfinite(grad_norm_bound_)) {
    throw std::invalid_argument("gradient norm bound must be positive and finite");
  }
  for (const auto& c : {metadata_.lipschitz_c1, metadata_.grad_at_origin_B, metadata_.loss_at_origin_A}) {
    if (c && (!std::isfinite(*c) || *c < 0.0)) {
      throw std::invalid_argument("objective metadata must be finite and nonnegative");
    }
  }
}

double empirical_risk(const Objective& obj, const VectorRef& theta) {
  require_dim(obj.dim(), theta.size());
  const std::size_t n = obj.num_samples();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += obj.loss(i, theta);
  return sum / static_cast<double>(n);
}

void full_gradient(const Objective& obj, const VectorRef& theta, Vector& grad) {
  require_dim(obj.dim(), theta.size());
  const std::size_t n = obj.num_samples();
  grad.setZero(static_cast<Eigen::Index>(obj.dim()));
  for (std::size_t i = 0; i < n; ++i) obj.accumulate_gradient(i, theta, grad);
  grad /= static_cast<double>(n);
}

double minibatch_risk(const Objective& obj, const MiniBatch& batch, const VectorRef& theta) {
  require_dim(obj.dim(), theta.size());
  double sum = 0.0;
  for (std::size_t i : batch.indices) {
    if (i >= obj.num_samples()) throw std::out_of_range("mini-batch index out of range");
    sum += obj.loss(i, theta);
  }
  return sum / static_cast<double>(batch.size());
}

void minibatch_risk_grad(const Objective& obj, const MiniBatch& batch, const VectorRef& theta,
                         Vector& grad) {
  require_dim(obj.dim(), theta.size());
  if (batch.indices.empty()) throw std::invalid_argument("empty mini-batch");
  grad.setZero(static_cast<Eigen::Index>(obj.dim()));
  for (std::size_t i : batch.indices) {
    if (i >= obj.num_samples()) throw std::out_of_range("mini-batch index out of range");
    obj.accumulate_gradient(i, theta, grad);
  }
  grad /= static_cast<double>(batch.size());
}

Vector minibatch_risk_grad(const Objective& obj, const MiniBatch& batch, const VectorRef& theta) {
  Vector g;
  minibatch_risk_grad(obj, batch, theta, g);
  return g;
}

MiniBatch sample_minibatch(std::size_t n, std::size_t m, RngStream& rng) {
  if (m < 1 || m > n) throw std::invalid_argument("batch size must lie in [1, n]");
  if (m == n) return full_batch(n);
  // Partial Fisher-Yates over [0, n).
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  return MiniBatch{std::move(pool)};
}

MiniBatch full_batch(std::size_t n) {
  MiniBatch b;
  b.indices.resize(n);
  std::iota(b.indices.begin(), b.indices.end(), std::size_t{0});
  return b;
}

double check_gradient(const Objective& obj, const VectorRef& theta, double h) {
  Vector analytic;
  full_gradient(obj, theta, analytic);
  Vector probe = theta;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    const double x = theta[i];
    const double step = h * std::max(1.0, std::abs(x));
    probe[i] = x + step;
    const double up = empirical_risk(obj, probe);
    probe[i] = x - step;
    const double down = empirical_risk(obj, probe);
    probe[i] = x;
    const double numeric = (up - down) / (2.0 * step);
    const double err = std::abs(numeric - analytic[i]) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

void enforce_gradient_bound(const Objective& obj, const Vector& grad) {
  const double norm = grad.norm();
  if (norm > obj.grad_norm_bound() * (1.0 + 1e-9)) {
    throw GradientBoundViolation("gradient norm " + std::to_string(norm) +
                                 " exceeds declared bound " +
                                 std::to_string(obj.grad_norm_bound()) + " for " + obj.name());
  }
}

namespace {

double lo(const TorusDomain& d, std::size_t i) { return d.origin()[i]; }
double hi(const TorusDomain& d, std::size_t i) { return d.origin()[i] + d.side_lengths()[i]; }

// f'(x) = 4x^3 - 12x^2 - 72x for the quartic part of the double well.
double quartic_slope(double x) { return 4.0 * x * x * x - 12.0 * x * x - 72.0 * x; }
double quartic_curvature(double x) { return 12.0 * x * x - 24.0 * x - 72.0; }

double sup_abs_quartic_slope(double a, double b) {
  double best = std::max(std::abs(quartic_slope(a)), std::abs(quartic_slope(b)));
  for (double c : {1.0 - std::sqrt(7.0), 1.0 + std::sqrt(7.0)}) {
    if (c > a && c < b) best = std::max(best, std::abs(quartic_slope(c)));
  }
  return best;
}

double sup_abs_quartic_curvature(double a, double b) {
  // Convex parabola: the sup of |.| sits at an endpoint or at the vertex x = 1.
  double best = std::max(std::abs(quartic_curvature(a)), std::abs(quartic_curvature(b)));
  if (a < 1.0 && 1.0 < b) best = std::max(best, std::abs(quartic_curvature(1.0)));
  return best;
}

class DoubleWell final : public Objective {
 public:
  DoubleWell(const TorusDomain& domain, double bound, ObjectiveMetadata meta)
      : Objective(domain, bound, meta) {}

  std::string name() const override { return dim() == 1 ? "double_well_1d" : "double_well_2d"; }
  std::size_t num_samples() const override { return 1; }

  double loss(std::size_t, const VectorRef& t) const override {
    const double x = t[0];
    double v = x * x * x * x - 4.0 * x * x * x - 36.0 * x * x + 864.0;
    if (dim() == 2) v += t[1] * t[1];
    return v;
  }

  void accumulate_gradient(std::size_t, const VectorRef& t, Vector& g) const override {
    g[0] += quartic_slope(t[0]);
    if (dim() == 2) g[1] += 2.0 * t[1];
  }

  nlohmann::json spec() const override { return {{"name", name()}, {"domain", domain().to_json()}}; }
};

std::unique_ptr<Objective> make_double_well(const TorusDomain& domain, std::size_t dim) {
  require_dim(dim, static_cast<Eigen::Index>(domain.dim()));
  const double fx = sup_abs_quartic_slope(lo(domain, 0), hi(domain, 0));
  double bound_sq = fx * fx;
  double c1 = sup_abs_quartic_curvature(lo(domain, 0), hi(domain, 0));
  if (dim == 2) {
    const double fy = 2.0 * std::max(std::abs(lo(domain, 1)), std::abs(hi(domain, 1)));
    bound_sq += fy * fy;
    c1 = std::max(c1, 2.0);
  }
  ObjectiveMetadata meta{c1, 0.0, 864.0};
  return std::make_unique<DoubleWell>(domain, std::sqrt(bound_sq), meta);
}

class QuadraticBowl final : public Objective {
 public:
  QuadraticBowl(const TorusDomain& domain, std::vector<Vector> centers, double bound,
                ObjectiveMetadata meta)
      : Objective(domain, bound, meta), centers_(std::move(centers)) {}

  std::string name() const override { return "quadratic_bowl"; }
  std::size_t num_samples() const override { return centers_.size(); }

  double loss(std::size_t i, const VectorRef& t) const override {
    return 0.5 * (t - centers_[i]).squaredNorm();
  }

  void accumulate_gradient(std::size_t i, const VectorRef& t, Vector& g) const override {
    g += t - centers_[i];
  }

  nlohmann::json spec() const override {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : centers_) cs.push_back(std::vector<double>(c.data(), c.data() + c.size()));
    return {{"name", name()}, {"domain", domain().to_json()}, {"centers", cs}};
  }

 private:
  std::vector<Vector> centers_;
};

class Linreg final : public Objective {
 public:
  Linreg(const TorusDomain& domain, LinregData data, std::vector<Vector> rows, double bound,
         ObjectiveMetadata meta)
      : Objective(domain, bound, meta), data_(std::move(data)), rows_(std::move(rows)) {}

  std::string name() const override { return "linreg_synthetic"; }
  std::size_t num_samples() const override { return rows_.size(); }

  double loss(std::size_t i, const VectorRef& t) const override {
    const double r = rows_[i].dot(t) - data_.y[i];
    return 0.5 * r * r;
  }

  void accumulate_gradient(std::size_t i, const VectorRef& t, Vector& g) const override {
    const double r = rows_[i].dot(t) - data_.y[i];
    g += r * rows_[i];
  }

  nlohmann::json spec() const override {
    return {{"name", name()},       {"domain", domain().to_json()}, {"n", data_.n},
            {"d", data_.d},         {"noise", data_.noise},         {"seed", data_.seed}};
  }

 private:
  LinregData data_;
  std::vector<Vector> rows_;
};

}  // namespace

std::unique_ptr<Objective> double_well_2d(const TorusDomain& domain) {
  return make_double_well(domain, 2);
}

std::unique_ptr<Objective> double_well_1d(const TorusDomain& domain) {
  return make_double_well(domain, 1);
}

std::unique_ptr<Objective> quadratic_bowl(const TorusDomain& domain, std::vector<Vector> centers) {
  if (centers.empty()) throw std::invalid_argument("quadratic_bowl needs at least one center");
  double bound = 0.0;
  double b = 0.0;
  double a = 0.0;
  for (const auto& c : centers) {
    require_dim(domain.dim(), c.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < domain.dim(); ++i) {
      const double ci = c[static_cast<Eigen::Index>(i)];
      const double far = std::max(std::abs(lo(domain, i) - ci), std::abs(hi(domain, i) - ci));
      sq += far * far;
    }
    bound = std::max(bound, std::sqrt(sq));
    b = std::max(b, c.norm());
    a = std::max(a, 0.5 * c.squaredNorm());
  }
  return std::make_unique<QuadraticBowl>(domain, std::move(centers), bound,
                                         ObjectiveMetadata{1.0, b, a});
}

nlohmann::json LinregData::to_json() const {
  return {{"seed", seed}, {"n", n},          {"d", d},
          {"noise", noise}, {"X", X},        {"y", y},
          {"true_weights", true_weights}};
}

LinregData LinregData::from_json(const nlohmann::json& j) {
  LinregData data;
  data.seed = j.at("seed").get<std::uint64_t>();
  data.n = j.at("n").get<std::size_t>();
  data.d = j.at("d").get<std::size_t>();
  data.noise = j.at("noise").get<double>();
  data.X = j.at("X").get<std::vector<std::vector<double>>>();
  data.y = j.at("y").get<std::vector<double>>();
  if (j.contains("true_weights")) data.true_weights = j.at("true_weights").get<std::vector<double>>();
  if (data.X.size() != data.n || data.y.size() != data.n) {
    throw std::invalid_argument("linreg data: row count does not match n");
  }
  for (const auto& row : data.X) {
    if (row.size() != data.d) throw DimensionMismatch(data.d, row.size());
  }
  return data;
}

LinregData generate_linreg(std::size_t n, std::size_t d, double noise, std::uint64_t seed,
                           std::uint64_t sample_stream) {
  if (n == 0 || d == 0) throw std::invalid_argument("linreg needs n >= 1 and d >= 1");
  if (!(noise >= 0.0)) throw std::invalid_argument("linreg noise must be nonnegative");
  LinregData data;
  data.seed = seed;
  data.n = n;
  data.d = d;
  data.noise = noise;
  RngStream weights_rng(seed, 0);
  data.true_weights.resize(d);
  for (auto& w : data.true_weights) w = weights_rng.normal();
  RngStream rng = weights_rng.split(1 + sample_stream);
  data.X.assign(n, std::vector<double>(d));
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      data.X[i][j] = rng.normal();
      dot += data.X[i][j] * data.true_weights[j];
    }
    data.y[i] = dot + noise * rng.normal();
  }
  return data;
}

std::unique_ptr<Objective> linreg_objective(const TorusDomain& domain, LinregData data) {
  require_dim(data.d, static_cast<Eigen::Index>(domain.dim()));
  std::vector<Vector> rows;
  rows.reserve(data.n);
  double bound = 0.0;
  double c1 = 0.0;
  double b = 0.0;
  double a = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    Vector row = Eigen::Map<const Vector>(data.X[i].data(), static_cast<Eigen::Index>(data.d));
    // |<theta, x>| <= sum_j |x_j| max(|lo_j|, |hi_j|) on the box.
    double reach = 0.0;
    for (std::size_t j = 0; j < data.d; ++j) {
      reach += std::abs(row[static_cast<Eigen::Index>(j)]) *
               std::max(std::abs(lo(domain, j)), std::abs(hi(domain, j)));
    }
    const double yi = std::abs(data.y[i]);
    bound = std::max(bound, row.norm() * (reach + yi));
    c1 = std::max(c1, row.squaredNorm());
    b = std::max(b, row.norm() * yi);
    a = std::max(a, 0.5 * yi * yi);
    rows.push_back(std::move(row));
  }
  bound = std::max(bound, 1e-12);
  return std::make_unique<Linreg>(domain, std::move(data), std::move(rows), bound,
                                  ObjectiveMetadata{c1, b, a});
}

std::unique_ptr<Objective> linreg_synthetic(const TorusDomain& domain, std::size_t n, std::size_t d,
                                            double noise, std::uint64_t seed) {
  return linreg_objective(domain, generate_linreg(n, d, noise, seed));
}

std::unique_ptr<Objective> make_objective(const nlohmann::json& spec) {
  const auto name = spec.at("name").get<std::string>();
  const TorusDomain domain = TorusDomain::from_json(spec.at("domain"));
  if (name == "double_well_2d") return double_well_2d(domain);
  if (name == "double_well_1d") return double_well_1d(domain);
  if (name == "quadratic_bowl") {
    std::vector<Vector> centers;
    if (spec.contains("centers")) {
      for (const auto& c : spec.at("centers")) {
        const auto v = c.get<std::vector<double>>();
        centers.emplace_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
    } else {
      centers.emplace_back(Vector::Zero(static_cast<Eigen::Index>(domain.dim())));
    }
    return quadratic_bowl(domain, std::move(centers));
  }
  if (name == "linreg_synthetic") {
    if (spec.contains("data_file")) {
      std::ifstream in(spec.at("data_file").get<std::string>());
      if (!in) throw std::runtime_error("cannot open linreg data file");
      return linreg_objective(domain, LinregData::from_json(nlohmann::json::parse(in)));
    }
    return linreg_synthetic(domain, spec.at("n").get<std::size_t>(), spec.at("d").get<std::size_t>(),
                            spec.value("noise", 0.0), spec.at("seed").get<std::uint64_t>());
  }
  throw std::invalid_argument("unknown objective: " + name);
}

std::vector<ObjectiveInfo> list_objectives() {
  return {
      {"double_well_2d", "x^4 - 4x^3 - 36x^2 + y^2 + 864; local min (-3,0), global min (6,0)"},
      {"double_well_1d", "x^4 - 4x^3 - 36x^2 + 864; local min -3, global min 6"},
      {"quadratic_bowl", "mean of ||theta - z_i||^2 / 2 over the given centers"},
      {"linreg_synthetic", "squared loss on Gaussian design with persisted generator"},
  };
}

}  // namespace psgd
