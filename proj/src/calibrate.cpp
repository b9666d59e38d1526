#include "edgeoff/association.hpp"
#include "edgeoff/sim.hpp"

namespace edgeoff {

namespace {

CalibrationProbe probe_at(const ScenarioConfig& config, double p,
                          double target_delay_s, std::int64_t slots,
                          int deployments, std::uint64_t seed, int jobs) {
  const AggregateMetrics agg =
      run_many(config, max_snr_factory(p), slots, deployments, seed, jobs);
  CalibrationProbe pr;
  pr.p = p;
  pr.delay_s = agg.mean.avg_delay_s;
  pr.e_weighted = agg.mean.e_weighted;
  pr.meets_target = pr.delay_s <= target_delay_s;
  return pr;
}

}  // namespace

CalibrationResult calibrate_duty_cycle(const ScenarioConfig& config,
                                       double target_delay_s,
                                       std::int64_t slots, int deployments,
                                       std::uint64_t seed, int jobs) {
  if (target_delay_s <= 0.0)
    throw CalibrationError("calibration target delay must be positive");
  if (slots <= 0 || deployments <= 0)
    throw CalibrationError("calibration needs positive slots and deployments");

  CalibrationResult res;
  double lo = 0.0;
  double hi = -1.0;
  for (int i = 1; i <= 20; ++i) {
    const double p = 0.05 * i;
    const CalibrationProbe pr =
        probe_at(config, p, target_delay_s, slots, deployments, seed, jobs);
    res.probes.push_back(pr);
    if (pr.meets_target) {
      hi = p;
      lo = p - 0.05;
      break;
    }
  }
  if (hi < 0.0)
    throw CalibrationError(
        "delay target unreachable: even duty cycle 1.0 misses it");
  if (lo <= 0.0) {  // grid minimum already meets the target; nothing to refine
    res.p_star = hi;
    return res;
  }

  while (hi - lo > 0.01 + 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const CalibrationProbe pr =
        probe_at(config, mid, target_delay_s, slots, deployments, seed, jobs);
    res.probes.push_back(pr);
    if (pr.meets_target)
      hi = mid;
    else
      lo = mid;
  }
  res.p_star = hi;
  return res;
}

}  // namespace edgeoff
