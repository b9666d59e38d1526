#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "edgeoff/io.hpp"
#include "edgeoff/sim.hpp"

using namespace edgeoff;

namespace {

ScenarioConfig small_config(int n_ues, int n_aps) {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.n_ues = n_ues;
  cfg.n_aps = n_aps;
  return cfg;
}

bool same_metrics(const RunMetrics& a, const RunMetrics& b) {
  auto eq = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  return a.slots == b.slots && a.n_ues == b.n_ues && eq(a.e_ue, b.e_ue) &&
         eq(a.e_ap, b.e_ap) && eq(a.e_es, b.e_es) &&
         eq(a.e_weighted, b.e_weighted) && eq(a.e_total, b.e_total) &&
         eq(a.avg_delay_s, b.avg_delay_s) &&
         eq(a.tracked_delay_s, b.tracked_delay_s) &&
         eq(a.violation_rate, b.violation_rate) &&
         eq(a.max_z_ratio, b.max_z_ratio) && eq(a.mean_reward, b.mean_reward) &&
         eq(a.mean_g2, b.mean_g2) && a.any_failure == b.any_failure;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("no arrivals settle into the all-idle sleep state") {
  ScenarioConfig cfg = small_config(2, 1);
  cfg.arrival_mean = 0.0;
  const RunMetrics m = run_once(cfg, exhaustive_factory(), 5, 77, 0);
  // 10% control subslot keeps idle radios at on-power: 0.004014 J per UE
  // slot, 0.004702 J per AP slot, 0.11 J per sleeping-server slot
  const double expected = 2 * 0.004014 + 0.004702 + 0.11;
  CHECK(m.e_total == doctest::Approx(expected).epsilon(1e-12));
  CHECK(m.e_weighted == doctest::Approx(expected / 3.0).epsilon(1e-12));
  CHECK(m.avg_delay_s == 0.0);
  CHECK(m.violation_rate == 0.0);
  CHECK_FALSE(m.any_failure);
  const double g2 = 1e9 * (2 * 0.004014 + 0.004702) / 3.0;
  CHECK(m.mean_g2 == doctest::Approx(g2).epsilon(1e-12));
  CHECK(m.mean_reward == doctest::Approx(-g2 / 1e6).epsilon(1e-12));
}

TEST_CASE("queue updates follow the recursions in drain-then-arrive order") {
  const ScenarioConfig cfg = small_config(2, 1);
  Deployment dep = generate_deployment(cfg, 5);
  SimEngine engine(cfg, dep, 5);
  ExhaustiveSolver solver;
  for (int t = 0; t < 40; ++t) {
    const std::vector<std::int64_t> l0 = engine.queues().q_local;
    const std::vector<std::int64_t> s0 = engine.queues().q_server;
    const std::vector<double> z0 = engine.queues().z;
    const StepInfo info = engine.step(solver);
    for (int k = 0; k < cfg.n_ues; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      CHECK(info.uplink_units[ks] ==
            uplink_units(info.links[ks].rate, cfg));
      CHECK(engine.queues().q_local[ks] ==
            step_local_queue(l0[ks], info.uplink_units[ks],
                             info.arrivals[ks]));
      CHECK(engine.queues().q_server[ks] ==
            step_server_queue(s0[ks], info.computed_units[ks], l0[ks],
                              info.uplink_units[ks]));
      CHECK(engine.queues().z[ks] ==
            step_virtual_queue(z0[ks],
                               static_cast<double>(engine.queues().q_total(k)),
                               engine.queues().q_avg[ks]));
    }
  }
}

TEST_CASE("metric accumulators equal the per-slot sums") {
  const ScenarioConfig cfg = small_config(2, 1);
  Deployment dep = generate_deployment(cfg, 9);
  SimEngine engine(cfg, dep, 9);
  ExhaustiveSolver solver;
  double e_total = 0.0, e_w = 0.0, g2 = 0.0, reward = 0.0;
  const int slots = 60;
  for (int t = 0; t < slots; ++t) {
    const StepInfo info = engine.step(solver);
    e_total += info.energy.e_total;
    e_w += info.energy.e_weighted;
    g2 += info.g2;
    reward += info.reward;
  }
  const RunMetrics m = engine.metrics();
  CHECK(m.slots == slots);
  CHECK(m.e_total == doctest::Approx(e_total / slots).epsilon(1e-12));
  CHECK(m.e_weighted == doctest::Approx(e_w / slots).epsilon(1e-12));
  CHECK(m.mean_g2 == doctest::Approx(g2 / slots).epsilon(1e-12));
  CHECK(m.mean_reward == doctest::Approx(reward / slots).epsilon(1e-12));
}

TEST_CASE("the engine's slot objective equals the solver's optimum exactly") {
  const ScenarioConfig cfg = small_config(3, 2);
  Deployment dep = generate_deployment(cfg, 13);
  SimEngine engine(cfg, dep, 13);
  ExhaustiveSolver solver;
  for (int t = 0; t < 50; ++t) {
    const StepInfo info = engine.step(solver);
    CHECK(info.g2 == solver.last_g2());
  }
}

TEST_CASE("identical seeds reproduce runs and traces byte for byte") {
  const ScenarioConfig cfg = small_config(2, 1);
  auto run = [&](std::string& qs, std::string& es, std::string& as) {
    std::ostringstream q, e, a;
    TraceSinks traces{&q, &e, &a};
    const RunMetrics m =
        run_once(cfg, exhaustive_factory(), 40, 21, 0, {}, traces);
    qs = q.str();
    es = e.str();
    as = a.str();
    return m;
  };
  std::string q1, e1, a1, q2, e2, a2;
  const RunMetrics m1 = run(q1, e1, a1);
  const RunMetrics m2 = run(q2, e2, a2);
  CHECK(same_metrics(m1, m2));
  CHECK(q1 == q2);
  CHECK(e1 == e2);
  CHECK(a1 == a2);
  CHECK(q1.size() > 0);
}

TEST_CASE("different seeds give different channel histories") {
  const ScenarioConfig cfg = small_config(2, 1);
  const RunMetrics a = run_once(cfg, exhaustive_factory(), 40, 21, 0);
  const RunMetrics b = run_once(cfg, exhaustive_factory(), 40, 22, 0);
  CHECK(a.e_total != b.e_total);
}

TEST_CASE("solving the subproblems in either order changes nothing") {
  const ScenarioConfig cfg = small_config(3, 2);
  EngineOptions swapped;
  swapped.p1_before_p2 = true;
  const RunMetrics a = run_once(cfg, exhaustive_factory(), 60, 31, 0);
  const RunMetrics b = run_once(cfg, exhaustive_factory(), 60, 31, 0, swapped);
  CHECK(same_metrics(a, b));
}

TEST_CASE("parallel deployment fan-out matches the serial path bitwise") {
  const ScenarioConfig cfg = small_config(2, 1);
  const AggregateMetrics serial =
      run_many(cfg, exhaustive_factory(), 50, 4, 37, 1);
  const AggregateMetrics parallel =
      run_many(cfg, exhaustive_factory(), 50, 4, 37, 2);
  REQUIRE(serial.runs.size() == 4);
  for (std::size_t d = 0; d < 4; ++d)
    CHECK(same_metrics(serial.runs[d], parallel.runs[d]));
  CHECK(same_metrics(serial.mean, parallel.mean));
  CHECK(same_metrics(serial.sem, parallel.sem));
}

TEST_CASE("two-deployment standard error is half the absolute difference") {
  const ScenarioConfig cfg = small_config(2, 1);
  const AggregateMetrics agg = run_many(cfg, exhaustive_factory(), 50, 2, 41);
  const double d = std::abs(agg.runs[0].e_total - agg.runs[1].e_total);
  CHECK(agg.sem.e_total == doctest::Approx(d / 2.0).epsilon(1e-12));
  CHECK(agg.mean.e_total ==
        doctest::Approx(0.5 * (agg.runs[0].e_total + agg.runs[1].e_total))
            .epsilon(1e-12));
}

TEST_CASE("run_many validates the deployment count") {
  const ScenarioConfig cfg = small_config(2, 1);
  CHECK_THROWS_AS(run_many(cfg, exhaustive_factory(), 10, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("engine rejects a deployment that contradicts the config") {
  const ScenarioConfig cfg = small_config(2, 1);
  Deployment dep = generate_deployment(cfg, 3);
  dep.ue_positions.pop_back();
  dep.candidate_sets.pop_back();
  CHECK_THROWS_AS(SimEngine(cfg, dep, 3), std::invalid_argument);
}

TEST_CASE("queue-average delay agrees with the tracked per-unit delay") {
  const ScenarioConfig cfg = small_config(3, 2);
  EngineOptions opt;
  opt.track_delay = true;
  const RunMetrics m = run_once(cfg, exhaustive_factory(), 4000, 43, 0, opt);
  REQUIRE(std::isfinite(m.tracked_delay_s));
  CHECK(m.tracked_delay_s > 0.0);
  CHECK(m.avg_delay_s ==
        doctest::Approx(m.tracked_delay_s).epsilon(0.10));
  // the virtual queues stay sublinear: time-average well under the target
  CHECK(m.max_z_ratio < 0.05);
}

TEST_CASE("omega sweep rows come back sorted and reproducible") {
  const ScenarioConfig cfg = small_config(2, 1);
  const std::vector<double> omegas = {1e9, 1e6};  // deliberately unsorted
  const auto rows =
      sweep_omega(cfg, omegas, exhaustive_factory(), 40, 2, 47);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].omega == 1e6);
  CHECK(rows[1].omega == 1e9);
  CHECK(rows[0].agg.runs.size() == 2);
  const auto again =
      sweep_omega(cfg, omegas, exhaustive_factory(), 40, 2, 47);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(same_metrics(rows[i].agg.mean, again[i].agg.mean));
}

TEST_CASE("policy solver requests stay inside the action masks") {
  const ScenarioConfig cfg = small_config(3, 2);
  Deployment dep = generate_deployment(cfg, 53);
  SimEngine engine(cfg, dep, 53);
  Rng init(derive_seed(53, seed_stream::policy_init));
  PolicyParameters pp =
      PolicyParameters::create(16, cfg.n_aps, NormConstants::from_config(cfg),
                               init);
  PolicySolver solver(pp, 53, ActMode::sample);
  std::vector<Sample> collected;
  solver.attach_collector(&collected);
  for (int t = 0; t < 10; ++t) {
    const StepInfo info = engine.step(solver);
    for (int k = 0; k < cfg.n_ues; ++k) {
      const int a = info.assoc.action(k);
      CHECK(a >= 0);
      CHECK(a <= cfg.n_aps);
      if (a > 0) {
        const auto& cand = dep.candidate_sets[static_cast<std::size_t>(k)];
        CHECK(std::find(cand.begin(), cand.end(), a - 1) != cand.end());
      }
    }
  }
  CHECK(collected.size() == 30);  // one sample per UE per slot
  for (const Sample& s : collected) {
    CHECK(s.radio_obs.size() == static_cast<std::size_t>(pp.radio_dim()));
    CHECK(s.mask.size() == static_cast<std::size_t>(pp.action_dim()));
    CHECK(s.agent_count == cfg.n_ues);  // radius 0: everyone talks
    CHECK(s.mec_all.size() ==
          static_cast<std::size_t>(s.agent_count) * PolicyParameters::mec_dim);
    CHECK(s.mask[static_cast<std::size_t>(s.action)] == 1);
    CHECK(std::isfinite(s.logp_old));
    CHECK(std::isfinite(s.value_old));
  }
}

TEST_CASE("greedy policy rollouts are deterministic") {
  const ScenarioConfig cfg = small_config(3, 2);
  Rng init(99);
  PolicyParameters pp = PolicyParameters::create(
      16, cfg.n_aps, NormConstants::from_config(cfg), init);
  auto actions_of = [&] {
    Deployment dep = generate_deployment(cfg, 59);
    SimEngine engine(cfg, dep, 59);
    PolicySolver solver(pp, 59, ActMode::greedy);
    std::vector<int> actions;
    for (int t = 0; t < 15; ++t) {
      const StepInfo info = engine.step(solver);
      for (int k = 0; k < cfg.n_ues; ++k) actions.push_back(info.assoc.action(k));
    }
    return actions;
  };
  CHECK(actions_of() == actions_of());
}

TEST_CASE("a checkpoint built for another AP count is rejected") {
  const ScenarioConfig cfg = small_config(2, 2);
  Deployment dep = generate_deployment(cfg, 61);
  SimEngine engine(cfg, dep, 61);
  Rng init(1);
  PolicyParameters pp =
      PolicyParameters::create(8, 3, NormConstants::from_config(cfg), init);
  PolicySolver solver(pp, 61, ActMode::greedy);
  CHECK_THROWS_AS(engine.step(solver), std::invalid_argument);
}

TEST_CASE("random exploration mode still respects the frequency grid") {
  ScenarioConfig cfg = small_config(2, 1);
  Deployment dep = generate_deployment(cfg, 67);
  EngineOptions opt;
  opt.random_cpu = true;
  SimEngine engine(cfg, dep, 67, opt);
  ExhaustiveSolver solver;
  for (int t = 0; t < 30; ++t) {
    const StepInfo info = engine.step(solver);
    bool on_grid = false;
    for (double f : cfg.cpu_freq_set)
      if (info.f_c == f) on_grid = true;
    CHECK(on_grid);
    double share_sum = 0.0;
    for (double f : info.cpu_shares) share_sum += f;
    if (info.f_c == 0.0)
      CHECK(share_sum == 0.0);
    else
      CHECK(share_sum == doctest::Approx(info.f_c).epsilon(1e-9));
  }
}

}  // TEST_SUITE
