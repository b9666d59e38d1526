// Serial-vs-OpenMP benchmark for the two parallel kernels: the exhaustive
// per-slot association scan and the multi-deployment run driver. The serial
// lane is the reference implementation; both lanes must agree exactly.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "edgeoff/sim.hpp"

using namespace edgeoff;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void bench_exhaustive(const ScenarioConfig& config, int slots, int jobs) {
  const std::uint64_t dep_seed = derive_seed(7, seed_stream::deployment, 0);
  Deployment dep = generate_deployment(config, dep_seed);
  const RadioGeometry geom = RadioGeometry::build(dep, config);
  Rng rng(derive_seed(7, seed_stream::channels));
  QueueSet queues(config.n_ues);
  for (int k = 0; k < config.n_ues; ++k) {
    queues.q_local[k] = 40 * (k + 1);
    queues.q_server[k] = 15 * (k + 1);
    queues.z[k] = 3.0 * k;
    queues.set_targets(k, 500.0, config.epsilon1, config.epsilon2);
  }
  const SlotContext ctx = SlotContext::of(queues, config);

  double best_serial = 0.0, best_parallel = 0.0;
  double t_serial = 0.0, t_parallel = 0.0;
  for (int lane = 0; lane < 2; ++lane) {
    Rng lane_rng(derive_seed(7, seed_stream::channels));
    double acc = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < slots; ++t) {
      const ChannelSnapshot snap = draw_channels(dep, config, lane_rng);
      const SlotRadioContext radio =
          SlotRadioContext::build(geom, snap, config);
      const ExhaustiveResult res =
          exhaustive_p2(ctx, radio, geom, dep, lane == 0 ? 1 : jobs);
      acc += res.g2;
    }
    if (lane == 0) {
      t_serial = seconds_since(t0);
      best_serial = acc;
    } else {
      t_parallel = seconds_since(t0);
      best_parallel = acc;
    }
  }
  std::printf("exhaustive scan   %5d slots  serial %8.3fs  omp(%d) %8.3fs"
              "  speedup %.2fx  %s\n",
              slots, t_serial, jobs, t_parallel, t_serial / t_parallel,
              best_serial == best_parallel ? "results identical"
                                           : "RESULTS DIFFER");
  if (best_serial != best_parallel) std::exit(1);
}

void bench_run_many(const ScenarioConfig& config, int slots, int deployments,
                    int jobs) {
  double e_serial = 0.0, e_parallel = 0.0;
  double t_serial = 0.0, t_parallel = 0.0;
  for (int lane = 0; lane < 2; ++lane) {
    const auto t0 = std::chrono::steady_clock::now();
    const AggregateMetrics agg =
        run_many(config, max_snr_factory(0.3), slots, deployments, 7,
                 lane == 0 ? 1 : jobs);
    if (lane == 0) {
      t_serial = seconds_since(t0);
      e_serial = agg.mean.e_weighted;
    } else {
      t_parallel = seconds_since(t0);
      e_parallel = agg.mean.e_weighted;
    }
  }
  std::printf("run driver  %dx%5d slots  serial %8.3fs  omp(%d) %8.3fs"
              "  speedup %.2fx  %s\n",
              deployments, slots, t_serial, jobs, t_parallel,
              t_serial / t_parallel,
              e_serial == e_parallel ? "results identical" : "RESULTS DIFFER");
  if (e_serial != e_parallel) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  int slots = argc > 1 ? std::atoi(argv[1]) : 200;
  int jobs = argc > 2 ? std::atoi(argv[2])
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  ScenarioConfig config = ScenarioConfig::defaults();
  config.validate();
  bench_exhaustive(config, slots, jobs);
  bench_run_many(config, slots, 8, jobs);
  return 0;
}
