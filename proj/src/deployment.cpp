#include "edgeoff/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace edgeoff {

Deployment generate_deployment(const ScenarioConfig& config,
                               std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  Deployment dep;
  const int n = config.n_aps;
  const int k = config.n_ues;
  dep.ap_positions.resize(n);

  // Regular ring with the configured distance between adjacent APs. A single
  // AP sits at the origin; two APs sit symmetrically about it.
  if (n == 1) {
    dep.ap_positions[0] = {0.0, 0.0};
  } else {
    const double step = 2.0 * std::numbers::pi / n;
    const double ring_r = config.inter_cell_distance / (2.0 * std::sin(step / 2.0));
    for (int i = 0; i < n; ++i) {
      const double a = step * i;
      dep.ap_positions[i] = {ring_r * std::cos(a), ring_r * std::sin(a)};
    }
  }

  // UEs uniform over the union of coverage disks, by rejection from the
  // bounding box of all disks.
  double lo_x = std::numeric_limits<double>::max(), hi_x = -lo_x;
  double lo_y = std::numeric_limits<double>::max(), hi_y = -lo_y;
  for (const Vec2& ap : dep.ap_positions) {
    lo_x = std::min(lo_x, ap.x - config.cell_radius);
    hi_x = std::max(hi_x, ap.x + config.cell_radius);
    lo_y = std::min(lo_y, ap.y - config.cell_radius);
    hi_y = std::max(hi_y, ap.y + config.cell_radius);
  }
  dep.ue_positions.resize(k);
  for (int i = 0; i < k; ++i) {
    for (;;) {
      const Vec2 p{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
      bool covered = false;
      for (const Vec2& ap : dep.ap_positions)
        if (distance(p, ap) <= config.cell_radius) {
          covered = true;
          break;
        }
      if (covered) {
        dep.ue_positions[i] = p;
        break;
      }
    }
  }

  const double reach = config.candidate_radius_factor * config.cell_radius;
  dep.candidate_sets.assign(k, {});
  for (int i = 0; i < k; ++i) {
    int nearest = 0;
    double nearest_d = std::numeric_limits<double>::max();
    for (int a = 0; a < n; ++a) {
      const double d = distance(dep.ue_positions[i], dep.ap_positions[a]);
      if (d <= reach) dep.candidate_sets[i].push_back(a);
      if (d < nearest_d) {
        nearest_d = d;
        nearest = a;
      }
    }
    if (dep.candidate_sets[i].empty()) dep.candidate_sets[i].push_back(nearest);
  }
  return dep;
}

ArrivalProcess::ArrivalProcess(int n_ues, double mean_units_per_slot,
                               double slot_duration)
    : mean_(mean_units_per_slot),
      slot_duration_(slot_duration),
      unit_sums_(static_cast<std::size_t>(n_ues), 0.0) {
  if (n_ues < 1) throw ConfigError("ArrivalProcess: n_ues must be >= 1");
  if (mean_units_per_slot < 0.0)
    throw ConfigError("ArrivalProcess: negative arrival mean");
  if (slot_duration <= 0.0)
    throw ConfigError("ArrivalProcess: slot duration must be positive");
}

std::vector<std::int64_t> ArrivalProcess::sample(Rng& rng) {
  std::vector<std::int64_t> draws(unit_sums_.size());
  for (std::size_t i = 0; i < unit_sums_.size(); ++i) {
    draws[i] = rng.poisson(mean_);
    unit_sums_[i] += static_cast<double>(draws[i]);
  }
  ++slots_;
  return draws;
}

double ArrivalProcess::rate_estimate(int k) const {
  if (slots_ == 0) return 0.0;
  return unit_sums_.at(static_cast<std::size_t>(k)) /
         (static_cast<double>(slots_) * slot_duration_);
}

double delay_to_queue_bound(double delay_target_s, double rate_units_per_s) {
  if (delay_target_s <= 0.0 || rate_units_per_s <= 0.0)
    throw ConfigError("delay_to_queue_bound: inputs must be positive");
  return delay_target_s * rate_units_per_s;
}

}  // namespace edgeoff
