#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "edgeoff/association.hpp"
#include "edgeoff/config.hpp"
#include "edgeoff/cpu_scheduler.hpp"
#include "edgeoff/deployment.hpp"
#include "edgeoff/energy.hpp"
#include "edgeoff/objectives.hpp"
#include "edgeoff/policy.hpp"
#include "edgeoff/ppo.hpp"
#include "edgeoff/queueing.hpp"
#include "edgeoff/radio.hpp"
#include "edgeoff/rng.hpp"

namespace edgeoff {

// Everything a per-slot association solver may look at before deciding.
struct SlotView {
  std::int64_t t;
  const QueueSet& queues;
  const SlotRadioContext& radio;
  const RadioGeometry& geom;
  const Deployment& dep;
  const ScenarioConfig& config;
};

struct P2Decision {
  AssociationMatrix assoc;
  std::vector<std::uint8_t> ack;  // per UE: request admitted this slot
};

class P2Solver {
 public:
  virtual ~P2Solver() = default;
  virtual std::string name() const = 0;
  virtual P2Decision decide(const SlotView& view) = 0;
  // called after the slot resolves; default: stateless solver
  virtual void observe(const P2Decision& dec,
                       const std::vector<LinkBudget>& links,
                       const std::vector<double>& cpu_shares) {
    (void)dec;
    (void)links;
    (void)cpu_shares;
  }
};

class ExhaustiveSolver final : public P2Solver {
 public:
  explicit ExhaustiveSolver(int jobs = 1) : jobs_(jobs) {}
  std::string name() const override { return "exhaustive"; }
  P2Decision decide(const SlotView& view) override;
  double last_g2() const { return last_g2_; }

 private:
  int jobs_;
  double last_g2_ = 0.0;
};

class MaxSnrSolver final : public P2Solver {
 public:
  MaxSnrSolver(double p_duty, std::uint64_t seed)
      : p_duty_(p_duty), rng_(seed) {}
  std::string name() const override { return "max-snr"; }
  P2Decision decide(const SlotView& view) override;

 private:
  double p_duty_;
  Rng rng_;
};

// Runs the shared-parameter policy for every UE, arbitrates the requests,
// and (optionally) records PPO samples for the slot.
class PolicySolver final : public P2Solver {
 public:
  PolicySolver(PolicyParameters pp, std::uint64_t seed, ActMode mode,
               double neighborhood_radius = 0.0);
  std::string name() const override { return "learned"; }
  P2Decision decide(const SlotView& view) override;
  void observe(const P2Decision& dec, const std::vector<LinkBudget>& links,
               const std::vector<double>& cpu_shares) override;

  void attach_collector(std::vector<Sample>* sink) { collector_ = sink; }
  const PolicyParameters& parameters() const { return pp_; }

 private:
  PolicyParameters pp_;
  ActMode mode_;
  double radius_;
  Rng rng_;
  ObsMemory mem_;
  bool mem_ready_ = false;
  PolicyWorkspace ws_;
  std::vector<Sample>* collector_ = nullptr;
  std::vector<double> radio_obs_, mec_obs_, mec_gather_;
  std::vector<std::uint8_t> masks_;
  std::vector<int> requested_;
};

struct EngineOptions {
  bool random_cpu = false;   // exploration: uniform f_c, Dirichlet(1) shares
  bool track_delay = false;  // per-unit FIFO delay cross-check
  bool p1_before_p2 = false; // order probe: the two subproblems are decoupled
  int jobs = 1;              // threads for exhaustive scans
};

struct StepInfo {
  std::int64_t t = 0;
  double g2 = 0.0;
  double reward = 0.0;
  bool failed = false;  // a clip was exceeded after this slot's update
  double f_c = 0.0;
  EnergyReport energy;
  std::vector<std::int64_t> arrivals, uplink_units, computed_units;
  AssociationMatrix assoc;
  std::vector<LinkBudget> links;
  std::vector<double> cpu_shares;
};

struct RunMetrics {
  std::int64_t slots = 0;
  int n_ues = 0;
  double e_ue = 0.0, e_ap = 0.0, e_es = 0.0;  // J per slot
  double e_weighted = 0.0, e_total = 0.0;
  double avg_delay_s = 0.0;  // Little's law: mean_k avg(Q^tot_k) / Dbar_k
  double tracked_delay_s = std::numeric_limits<double>::quiet_NaN();
  double violation_rate = 0.0;
  double max_z_ratio = 0.0;  // max_k (Z_k(T)/T) / Q_avg_k
  double mean_reward = 0.0;
  double mean_g2 = 0.0;
  bool any_failure = false;
};

// Per-slot trace emitters (row-level; headers are the caller's concern).
struct TraceSinks {
  std::ostream* queues = nullptr;
  std::ostream* energy = nullptr;
  std::ostream* assoc = nullptr;
};

// One deployment, one run. Owns the channel/arrival/CPU randomness; the
// association solver is passed per step so callers can share or swap them.
class SimEngine {
 public:
  SimEngine(const ScenarioConfig& config, Deployment dep, std::uint64_t seed,
            EngineOptions opt = {});

  StepInfo step(P2Solver& solver);
  RunMetrics metrics() const;

  const ScenarioConfig& config() const { return config_; }
  const Deployment& deployment() const { return dep_; }
  const RadioGeometry& geometry() const { return geom_; }
  const QueueSet& queues() const { return queues_; }
  const ArrivalProcess& arrivals() const { return arrivals_; }
  std::int64_t slot() const { return t_; }
  TraceSinks traces;  // optional, plain data rows

 private:
  ScenarioConfig config_;
  Deployment dep_;
  RadioGeometry geom_;
  EngineOptions opt_;
  Rng rng_channels_, rng_arrivals_, rng_cpu_;
  ArrivalProcess arrivals_;
  QueueSet queues_;
  DelayTracker tracker_;
  std::int64_t t_ = 0;
  // accumulators
  double sum_e_ue_ = 0.0, sum_e_ap_ = 0.0, sum_e_es_ = 0.0;
  double sum_e_w_ = 0.0, sum_e_tot_ = 0.0;
  double sum_reward_ = 0.0, sum_g2_ = 0.0;
  std::int64_t violations_ = 0;
  std::vector<double> sum_q_total_;
};

using SolverFactory = std::function<std::unique_ptr<P2Solver>(
    const ScenarioConfig& config, const Deployment& dep,
    const RadioGeometry& geom, std::uint64_t seed)>;

SolverFactory exhaustive_factory(int jobs = 1);
SolverFactory max_snr_factory(double p_duty);
SolverFactory policy_factory(PolicyParameters pp, ActMode mode,
                             double neighborhood_radius = 0.0);

// Runs `slots` slots on deployment #dep_index derived from `seed`.
RunMetrics run_once(const ScenarioConfig& config, const SolverFactory& make,
                    std::int64_t slots, std::uint64_t seed, int dep_index,
                    EngineOptions opt = {}, TraceSinks traces = {});

struct AggregateMetrics {
  RunMetrics mean;              // averaged over deployments (max for ratios)
  RunMetrics sem;               // standard error of each averaged metric
  std::vector<RunMetrics> runs; // one per deployment
};

AggregateMetrics run_many(const ScenarioConfig& config,
                          const SolverFactory& make, std::int64_t slots,
                          int deployments, std::uint64_t seed, int jobs = 1,
                          EngineOptions opt = {});

struct SweepRow {
  double omega = 0.0;
  AggregateMetrics agg;
};

// Same deployments and channel draws for every omega (paired comparison).
std::vector<SweepRow> sweep_omega(const ScenarioConfig& config,
                                  std::vector<double> omegas,
                                  const SolverFactory& make,
                                  std::int64_t slots, int deployments,
                                  std::uint64_t seed, int jobs = 1);

}  // namespace edgeoff
