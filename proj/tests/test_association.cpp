#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "edgeoff/association.hpp"
#include "edgeoff/energy.hpp"
#include "edgeoff/objectives.hpp"

using namespace edgeoff;

namespace {

struct Scene {
  ScenarioConfig cfg;
  Deployment dep;
  RadioGeometry geom;
  ChannelSnapshot snap;
  SlotRadioContext radio;
  QueueSet queues;
};

Scene random_scene(int n_ues, int n_aps, Rng& rng, double omega,
                   bool restrict_candidates = false) {
  Scene s;
  s.cfg = ScenarioConfig::defaults();
  s.cfg.n_ues = n_ues;
  s.cfg.n_aps = n_aps;
  s.cfg.lyapunov_weight = omega;
  for (int n = 0; n < n_aps; ++n)
    s.dep.ap_positions.push_back({n * 60.0, 0.0});
  for (int k = 0; k < n_ues; ++k) {
    s.dep.ue_positions.push_back(
        {rng.uniform() * 60.0 * n_aps - 30.0, rng.uniform() * 80.0 - 40.0});
    std::vector<int> cand;
    for (int n = 0; n < n_aps; ++n) {
      if (restrict_candidates && rng.uniform() < 0.3) continue;
      cand.push_back(n);
    }
    s.dep.candidate_sets.push_back(cand);
  }
  s.geom = RadioGeometry::build(s.dep, s.cfg);
  s.snap = draw_channels(s.dep, s.cfg, rng);
  s.radio = SlotRadioContext::build(s.geom, s.snap, s.cfg);
  s.queues = QueueSet(n_ues);
  for (int k = 0; k < n_ues; ++k) {
    s.queues.q_local[k] = static_cast<std::int64_t>(rng.below(2000));
    s.queues.q_server[k] = static_cast<std::int64_t>(rng.below(500));
    s.queues.z[k] = rng.uniform() * 2000.0;
  }
  return s;
}

// second opinion: plain recursion over per-UE options, scoring through the
// reference link chain rather than the precomputed tables
struct EnumBest {
  double g2 = std::numeric_limits<double>::infinity();
  std::vector<int> actions;
  std::uint64_t feasible = 0;
};

double score_naive(const Scene& s, const std::vector<int>& actions) {
  AssociationMatrix assoc(s.cfg.n_ues, s.cfg.n_aps);
  for (int k = 0; k < s.cfg.n_ues; ++k) assoc.set_action(k, actions[k]);
  const auto links = compute_sinr_and_rate(assoc, s.snap, s.geom, s.cfg);
  std::vector<std::int64_t> units;
  std::vector<std::uint8_t> ue_active;
  std::vector<double> ptx;
  std::vector<std::uint8_t> ap_active(static_cast<std::size_t>(s.cfg.n_aps), 0);
  for (int k = 0; k < s.cfg.n_ues; ++k) {
    const LinkBudget& l = links[static_cast<std::size_t>(k)];
    units.push_back(l.active ? uplink_units(l.rate, s.cfg) : 0);
    ue_active.push_back(l.active ? 1 : 0);
    ptx.push_back(l.tx_power);
    if (l.active) ap_active[static_cast<std::size_t>(l.serving_ap)] = 1;
  }
  const double e_ue = ue_energy(ue_active, ptx, s.cfg);
  const double e_ap = ap_energy(ap_active, s.cfg);
  const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
  return eval_G2_terms(ctx, units, e_ue, e_ap);
}

void enumerate_rec(const Scene& s, std::vector<int>& actions, int k,
                   EnumBest& best) {
  if (k == s.cfg.n_ues) {
    std::vector<int> load(static_cast<std::size_t>(s.cfg.n_aps), 0);
    for (int a : actions)
      if (a != 0) ++load[static_cast<std::size_t>(a - 1)];
    for (int l : load)
      if (l > s.cfg.ap_capacity) return;
    ++best.feasible;
    const double g2 = score_naive(s, actions);
    if (g2 < best.g2) {  // first hit wins ties: recursion is lexicographic
      best.g2 = g2;
      best.actions = actions;
    }
    return;
  }
  actions[static_cast<std::size_t>(k)] = 0;
  enumerate_rec(s, actions, k + 1, best);
  std::vector<int> cand = s.dep.candidate_sets[static_cast<std::size_t>(k)];
  std::sort(cand.begin(), cand.end());
  for (int a : cand) {
    actions[static_cast<std::size_t>(k)] = a + 1;
    enumerate_rec(s, actions, k + 1, best);
  }
  actions[static_cast<std::size_t>(k)] = 0;
}

EnumBest enumerate_all(const Scene& s) {
  EnumBest best;
  std::vector<int> actions(static_cast<std::size_t>(s.cfg.n_ues), 0);
  enumerate_rec(s, actions, 0, best);
  return best;
}

Scene line_scene(const std::vector<double>& ue_x, int n_aps,
                 double shadowing_var = 0.0) {
  Scene s;
  s.cfg = ScenarioConfig::defaults();
  s.cfg.n_ues = static_cast<int>(ue_x.size());
  s.cfg.n_aps = n_aps;
  s.cfg.shadowing_variance_db = shadowing_var;
  for (int n = 0; n < n_aps; ++n)
    s.dep.ap_positions.push_back({n * 60.0, 0.0});
  for (double x : ue_x) {
    s.dep.ue_positions.push_back({x, 0.0});
    std::vector<int> cand;
    for (int n = 0; n < n_aps; ++n) cand.push_back(n);
    s.dep.candidate_sets.push_back(cand);
  }
  s.geom = RadioGeometry::build(s.dep, s.cfg);
  Rng rng(1);
  s.snap = draw_channels(s.dep, s.cfg, rng);
  s.radio = SlotRadioContext::build(s.geom, s.snap, s.cfg);
  s.queues = QueueSet(s.cfg.n_ues);
  return s;
}

}  // namespace

TEST_SUITE("association") {

TEST_CASE("empty queues and positive omega make idling optimal") {
  Rng rng(3);
  Scene s = random_scene(1, 1, rng, 1e9);
  s.queues = QueueSet(1);  // wipe the random queues
  const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
  const ExhaustiveResult r = exhaustive_p2(ctx, s.radio, s.geom, s.dep);
  CHECK(r.assoc.action(0) == 0);
  CHECK(r.candidates_enumerated == 2);
}

TEST_CASE("exhaustive scan matches an independent enumerator exactly") {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int K = 1 + static_cast<int>(rng.below(3));
    const int N = 1 + static_cast<int>(rng.below(2));
    const double omega = (trial % 3 == 0) ? 0.0 : ((trial % 3 == 1) ? 1e6 : 1e9);
    const Scene s = random_scene(K, N, rng, omega, trial % 2 == 1);
    const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
    const ExhaustiveResult fast = exhaustive_p2(ctx, s.radio, s.geom, s.dep);
    const EnumBest slow = enumerate_all(s);
    REQUIRE(fast.g2 == slow.g2);
    REQUIRE(fast.assoc.actions() == slow.actions);
    REQUIRE(fast.candidates_evaluated == slow.feasible);
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("exact G2 ties resolve to the lexicographically smallest vector") {
  Rng rng(5);
  Scene s = random_scene(2, 2, rng, 0.0);
  s.queues = QueueSet(2);  // omega = 0 and zero queues: every candidate is 0
  const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
  const ExhaustiveResult r = exhaustive_p2(ctx, s.radio, s.geom, s.dep);
  CHECK(r.g2 == 0.0);
  CHECK(r.assoc.actions() == std::vector<int>{0, 0});
}

TEST_CASE("candidate space size: six UEs with three options each is 4096") {
  Rng rng(7);
  const Scene s = random_scene(6, 3, rng, 1e9);
  const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
  const ExhaustiveResult r = exhaustive_p2(ctx, s.radio, s.geom, s.dep);
  CHECK(r.candidates_enumerated == 4096);
  CHECK(r.candidates_evaluated == 4096);  // capacity 15 never binds
}

TEST_CASE("per-AP capacity prunes the evaluated set") {
  Rng rng(7);
  Scene s = random_scene(3, 1, rng, 1e9);
  s.cfg.ap_capacity = 1;
  const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
  const ExhaustiveResult r = exhaustive_p2(ctx, s.radio, s.geom, s.dep);
  CHECK(r.candidates_enumerated == 8);
  CHECK(r.candidates_evaluated == 4);  // at most one of three UEs active
  CHECK(r.assoc.respects_capacity(1));
}

TEST_CASE("parallel scan returns the serial result") {
  Rng rng(11);
  const Scene s = random_scene(6, 3, rng, 1e9);
  const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
  const ExhaustiveResult serial = exhaustive_p2(ctx, s.radio, s.geom, s.dep, 1);
  const ExhaustiveResult parallel =
      exhaustive_p2(ctx, s.radio, s.geom, s.dep, 2);
  CHECK(serial.g2 == parallel.g2);
  CHECK(serial.assoc.actions() == parallel.assoc.actions());
  CHECK(serial.candidates_evaluated == parallel.candidates_evaluated);
}

TEST_CASE("search spaces beyond the guard are refused") {
  Rng rng(13);
  const Scene s = random_scene(13, 3, rng, 1e9);  // 4^13 = 2^26 > 2^24
  const SlotContext ctx = SlotContext::of(s.queues, s.cfg);
  CHECK_THROWS_AS(exhaustive_p2(ctx, s.radio, s.geom, s.dep),
                  SearchSpaceError);
}

TEST_CASE("zero duty cycle idles everyone") {
  const Scene s = line_scene({10.0, 25.0}, 2);
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const AssociationMatrix a =
        max_snr_heuristic(0.0, s.radio, s.dep, s.cfg, rng);
    for (int k = 0; k < 2; ++k) CHECK(a.action(k) == 0);
  }
}

TEST_CASE("full duty cycle sends both UEs to the nearer AP") {
  const Scene s = line_scene({5.0, 10.0}, 2);  // AP 0 at x=0, AP 1 at x=60
  Rng rng(19);
  const AssociationMatrix a = max_snr_heuristic(1.0, s.radio, s.dep, s.cfg, rng);
  CHECK(a.action(0) == 1);
  CHECK(a.action(1) == 1);
}

TEST_CASE("empirical activity rate concentrates around the duty cycle") {
  const Scene s = line_scene({15.0}, 1);
  const double p = 0.3;
  Rng rng(23);
  const int slots = 100000;
  int active = 0;
  for (int i = 0; i < slots; ++i) {
    const AssociationMatrix a =
        max_snr_heuristic(p, s.radio, s.dep, s.cfg, rng);
    active += a.active(0) ? 1 : 0;
  }
  const double rate = static_cast<double>(active) / slots;
  const double band = 3.0 * std::sqrt(p * (1.0 - p) / slots);
  CHECK(rate >= p - band);
  CHECK(rate <= p + band);
}

TEST_CASE("duty heuristic respects candidate sets and capacity") {
  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    Scene s = random_scene(5, 2, rng, 1e9, true);
    s.cfg.ap_capacity = 2;
    const AssociationMatrix a =
        max_snr_heuristic(0.8, s.radio, s.dep, s.cfg, rng);
    CHECK(a.respects_candidates(s.dep));
    CHECK(a.respects_capacity(2));
  }
}

TEST_CASE("arbitration admits the strongest requesters and ACKs them") {
  Scene s = line_scene({5.0, 10.0, 20.0}, 1);
  s.cfg.ap_capacity = 2;
  const auto [assoc, ack] =
      arbitrate_requests({1, 1, 1}, s.radio, s.cfg);
  // zero shadowing: beacon RSS decays with distance, so UE 2 loses
  CHECK(assoc.action(0) == 1);
  CHECK(assoc.action(1) == 1);
  CHECK(assoc.action(2) == 0);
  CHECK(ack == std::vector<std::uint8_t>{1, 1, 0});
}

TEST_CASE("arbitration leaves non-requesters idle with a zero ACK") {
  Scene s = line_scene({5.0, 10.0, 20.0}, 1);
  const auto [assoc, ack] =
      arbitrate_requests({1, 0, 1}, s.radio, s.cfg);
  CHECK(assoc.action(1) == 0);
  CHECK(ack[0] == 1);
  CHECK(ack[1] == 0);  // idle by choice, nothing to acknowledge
  CHECK(ack[2] == 1);
}

TEST_CASE("equal beacon strength breaks ties by UE index") {
  Scene s = line_scene({12.0, 12.0}, 1);  // same spot, zero shadowing
  s.cfg.ap_capacity = 1;
  REQUIRE(s.radio.rss_at(0, 0) == s.radio.rss_at(1, 0));
  const auto [assoc, ack] = arbitrate_requests({1, 1}, s.radio, s.cfg);
  CHECK(assoc.action(0) == 1);
  CHECK(assoc.action(1) == 0);
  CHECK(ack == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("vacuous delay target calibrates to the grid minimum") {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.n_ues = 2;
  cfg.n_aps = 1;
  const CalibrationResult res =
      calibrate_duty_cycle(cfg, 1e18, 200, 1, 42);
  CHECK(res.p_star == 0.05);
  CHECK(res.probes.size() == 1);
  CHECK(res.probes[0].meets_target);
}

TEST_CASE("no traffic calibrates to the grid minimum") {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.n_ues = 2;
  cfg.n_aps = 1;
  cfg.arrival_mean = 0.0;
  const CalibrationResult res =
      calibrate_duty_cycle(cfg, 0.1, 200, 1, 42);
  CHECK(res.p_star == 0.05);
}

TEST_CASE("tightening the delay target never lowers the duty cycle") {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.n_ues = 2;
  cfg.n_aps = 1;
  const CalibrationResult loose =
      calibrate_duty_cycle(cfg, 1e18, 400, 1, 7);
  const CalibrationResult tight =
      calibrate_duty_cycle(cfg, 0.2, 400, 1, 7);
  CHECK(tight.p_star >= loose.p_star);
  for (const CalibrationProbe& pr : tight.probes)
    CHECK(pr.meets_target == (pr.delay_s <= 0.2));
}

TEST_CASE("an unreachable target raises a calibration error") {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.n_ues = 2;
  cfg.n_aps = 1;
  CHECK_THROWS_AS(calibrate_duty_cycle(cfg, 1e-6, 150, 1, 7),
                  CalibrationError);
  CHECK_THROWS_AS(calibrate_duty_cycle(cfg, -1.0, 150, 1, 7),
                  CalibrationError);
}

}  // TEST_SUITE
