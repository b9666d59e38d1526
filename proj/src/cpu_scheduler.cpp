#include "edgeoff/cpu_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edgeoff {

namespace {

SlotContext p1_context(const QueueSet& queues, const ScenarioConfig& config,
                       double omega, double alpha3) {
  SlotContext ctx;
  ctx.queues = &queues;
  ctx.omega = omega;
  ctx.alpha = {0.0, 0.0, alpha3};
  ctx.config = &config;
  return ctx;
}

}  // namespace

ScheduleResult solve_p1(const QueueSet& queues, const ScenarioConfig& config,
                        double omega, double alpha3) {
  const int K = queues.n_ues();
  const double c = config.tau_g1() * config.units_per_cycle;
  const SlotContext ctx = p1_context(queues, config, omega, alpha3);

  struct Segment {
    double slope;
    int ue;
    int seg;     // 0: up to the breakpoint, 1: unbounded tail
    double cap;  // budget the segment can absorb (inf for seg 1)
  };
  std::vector<Segment> segments;
  segments.reserve(static_cast<std::size_t>(2 * K));
  for (int k = 0; k < K; ++k) {
    const double qs = static_cast<double>(queues.q_server[k]);
    const double z = queues.z[k];
    segments.push_back({-(2.0 * qs + z) * c, k, 0, (qs + 1.0) / c});
    segments.push_back(
        {-2.0 * qs * c, k, 1, std::numeric_limits<double>::infinity()});
  }
  // steepest descent first; a UE's first segment always precedes its tail
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) {
              if (a.slope != b.slope) return a.slope < b.slope;
              if (a.ue != b.ue) return a.ue < b.ue;
              return a.seg < b.seg;
            });

  ScheduleResult best;
  best.f_k.assign(static_cast<std::size_t>(K), 0.0);
  best.g1 = std::numeric_limits<double>::infinity();
  std::vector<double> shares(static_cast<std::size_t>(K));
  std::vector<std::uint8_t> granted(static_cast<std::size_t>(K));
  int iterations = 0;

  for (double f_c : config.cpu_freq_set) {
    std::fill(shares.begin(), shares.end(), 0.0);
    std::fill(granted.begin(), granted.end(), 0);
    double remaining = f_c;
    for (const Segment& s : segments) {
      if (remaining <= 0.0) break;
      if (s.slope >= 0.0) break;  // further budget cannot lower G1
      const double give = std::min(remaining, s.cap);
      if (give <= 0.0) continue;
      shares[static_cast<std::size_t>(s.ue)] += give;
      remaining -= give;
      if (!granted[static_cast<std::size_t>(s.ue)]) {
        granted[static_cast<std::size_t>(s.ue)] = 1;
        ++iterations;
      }
    }
    const double g1 = eval_G1(ctx, f_c, shares);
    if (g1 < best.g1) {  // ties keep the earlier (smaller) f_c
      best.g1 = g1;
      best.f_c = f_c;
      best.f_k = shares;
    }
  }
  best.iterations = iterations;
  return best;
}

ScheduleResult brute_force_p1(const QueueSet& queues,
                              const ScenarioConfig& config, double omega,
                              double alpha3, int grid_points) {
  const int K = queues.n_ues();
  const double c = config.tau_g1() * config.units_per_cycle;
  const SlotContext ctx = p1_context(queues, config, omega, alpha3);

  ScheduleResult best;
  best.f_k.assign(static_cast<std::size_t>(K), 0.0);
  best.g1 = std::numeric_limits<double>::infinity();
  int evals = 0;

  std::vector<double> shares(static_cast<std::size_t>(K), 0.0);

  for (double f_c : config.cpu_freq_set) {
    // candidate share values per UE: grid points plus the slope breakpoint
    std::vector<std::vector<double>> options(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      auto& opts = options[static_cast<std::size_t>(k)];
      opts.push_back(0.0);
      for (int g = 1; g <= grid_points; ++g)
        opts.push_back(f_c * static_cast<double>(g) /
                       static_cast<double>(grid_points));
      const double bp =
          (static_cast<double>(queues.q_server[k]) + 1.0) / c;
      if (bp <= f_c) opts.push_back(bp);
      std::sort(opts.begin(), opts.end());
      opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
    }

    auto consider = [&]() {
      const double g1 = eval_G1(ctx, f_c, shares);
      ++evals;
      if (g1 < best.g1) {
        best.g1 = g1;
        best.f_c = f_c;
        best.f_k = shares;
      }
    };

    // depth-first over the option grid; at each leaf also try handing the
    // leftover budget to each UE in turn (covers off-grid optima, since an
    // optimal corner has at most one UE away from {0, breakpoint})
    auto recurse = [&](auto&& self, int k, double used) -> void {
      if (k == K) {
        consider();
        const double leftover = f_c - used;
        if (leftover > 0.0) {
          for (int j = 0; j < K; ++j) {
            shares[static_cast<std::size_t>(j)] += leftover;
            consider();
            shares[static_cast<std::size_t>(j)] -= leftover;
          }
        }
        return;
      }
      for (double v : options[static_cast<std::size_t>(k)]) {
        if (used + v > f_c * (1.0 + 1e-12)) break;
        shares[static_cast<std::size_t>(k)] = v;
        self(self, k + 1, used + v);
      }
      shares[static_cast<std::size_t>(k)] = 0.0;
    };
    recurse(recurse, 0, 0.0);
  }
  best.iterations = evals;
  return best;
}

}  // namespace edgeoff
