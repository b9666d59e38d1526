#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "edgeoff/config.hpp"
#include "edgeoff/objectives.hpp"
#include "edgeoff/queueing.hpp"

namespace edgeoff {

// Eq.-2 style service: units the ES processes for one UE in one slot
inline std::int64_t computed_units(double f_k, const ScenarioConfig& config) {
  return static_cast<std::int64_t>(
      std::floor(config.data_fraction() * config.slot_duration *
                 config.units_per_cycle * f_k));
}

struct ScheduleResult {
  double f_c = 0.0;
  std::vector<double> f_k;
  double g1 = 0.0;
  int iterations = 0;  // UEs granted budget across all f_c candidates
};

// Exact P1 solver. For each f_c in F the inner problem is a separable convex
// piecewise-linear minimization solved by greedy water-filling over slopes:
// a UE's first segment has slope -(2*Q^s+Z)*c up to f = (Q^s+1)/c (after
// which the max-term is exhausted), its second segment slope -2*Q^s*c with
// no cap (c = tau*J). The outer loop keeps the f_c with the best G1
// including the energy term; ties go to the smaller f_c.
ScheduleResult solve_p1(const QueueSet& queues, const ScenarioConfig& config,
                        double omega, double alpha3);

// Test oracle: exhaustive search over F x a share grid that includes every
// per-UE breakpoint, simplex vertices, and leftover-absorption variants.
ScheduleResult brute_force_p1(const QueueSet& queues,
                              const ScenarioConfig& config, double omega,
                              double alpha3, int grid_points);

}  // namespace edgeoff
