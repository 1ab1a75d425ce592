#include "doctest.h"

#include <vector>

#include "psgd/bps.hpp"
#include "psgd/metrics.hpp"
#include "psgd/stationary.hpp"

using namespace psgd;

namespace {

// Occupation histogram of one long chain, sampled after every step.
template <class Sampler>
std::vector<double> occupation(Sampler& sampler, const GridDensity& grid, std::size_t burn_in, std::size_t steps) {
  auto state = sampler.initial_state();
  for (std::size_t k = 0; k < burn_in; ++k) sampler.advance(state);
  std::vector<double> mass(grid.num_cells(), 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    sampler.advance(state);
    mass[grid.cell_index(state.theta)] += 1.0;
  }
  for (auto& m : mass) m /= static_cast<double>(steps);
  return mass;
}

}  // namespace

// The per-step law of the event chain weights each point by its total event
// rate, which averages the gradient term over the velocity sphere: weight
// E[(v_1)_+] = a_d / 2. The gradient weight a_d is measurably different here.
TEST_CASE("long BPS chain occupation matches the half-weight stationary law") {
  const auto obj = quadratic_bowl(TorusDomain({10.0}, {-5.0}), {Vector::Zero(1)});
  BpsConfig cfg = BpsConfig::coupled_with(*obj, 1.0, 1.0);
  cfg.steps = 10'000'000;
  cfg.initial_point = Vector::Constant(1, 3.0);
  cfg.initial_velocity = Vector::Ones(1);
  cfg.seed = 21;
  BouncyParticleSampler bps(*obj, cfg);

  const double w = a_d(1);
  const auto full = normalize_on_grid(StationaryDensity(*obj, 1.0, 1.0, w), {64});
  const auto half = normalize_on_grid(StationaryDensity(*obj, 1.0, 1.0, w / 2.0), {64});
  const auto mass = occupation(bps, full, 10'000, cfg.steps);
  const double tv_full = histogram_tv(mass, full.mass);
  const double tv_half = histogram_tv(mass, half.mass);
  CAPTURE(tv_full);
  CAPTURE(tv_half);
  CHECK(histogram_tv(full.mass, half.mass) > 0.015);
  CHECK(tv_half < 0.005);
  CHECK(tv_half < tv_full);
}
