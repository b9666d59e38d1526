#pragma once

#include <cstdint>
#include <vector>

#include "edgeoff/config.hpp"
#include "edgeoff/rng.hpp"

namespace edgeoff {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Static geometry of one experiment: AP ring, UE positions, candidate sets.
struct Deployment {
  std::vector<Vec2> ap_positions;              // size N
  std::vector<Vec2> ue_positions;              // size K
  std::vector<std::vector<int>> candidate_sets;  // per UE, 0-based AP indices
};

// APs on a regular ring with the configured inter-cell distance between
// adjacent APs; UEs uniform over the union of AP coverage disks; candidate
// set = APs within candidate_radius_factor * R_0 (nearest AP as fallback).
Deployment generate_deployment(const ScenarioConfig& config,
                               std::uint64_t seed);

// Poisson task arrivals plus the controller's running per-UE rate estimate.
class ArrivalProcess {
 public:
  ArrivalProcess(int n_ues, double mean_units_per_slot, double slot_duration);

  // one draw per UE; updates the running estimates
  std::vector<std::int64_t> sample(Rng& rng);

  // D-bar: long-run arrival rate estimate, units/s (0 before any sample)
  double rate_estimate(int k) const;
  double mean_units_per_slot() const { return mean_; }
  std::int64_t slots_observed() const { return slots_; }

 private:
  double mean_;
  double slot_duration_;
  std::int64_t slots_ = 0;
  std::vector<double> unit_sums_;
};

// Little's-law translation of the delay target into a queue-length target.
double delay_to_queue_bound(double delay_target_s, double rate_units_per_s);

}  // namespace edgeoff
