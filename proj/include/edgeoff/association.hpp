#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgeoff/config.hpp"
#include "edgeoff/deployment.hpp"
#include "edgeoff/radio.hpp"
#include "edgeoff/rng.hpp"

namespace edgeoff {

struct SlotContext;  // objectives.hpp

class SearchSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One slot's UE-AP assignment. Per-UE action: 0 = idle, a in {1..N} = AP a-1;
// the binary matrix x_{k,n} is implied by the action vector.
class AssociationMatrix {
 public:
  AssociationMatrix() = default;
  AssociationMatrix(int n_ues, int n_aps)
      : n_aps_(n_aps), actions_(static_cast<std::size_t>(n_ues), 0) {}

  int n_ues() const { return static_cast<int>(actions_.size()); }
  int n_aps() const { return n_aps_; }
  int action(int k) const { return actions_[static_cast<std::size_t>(k)]; }
  void set_action(int k, int a) {
    if (a < 0 || a > n_aps_)
      throw std::out_of_range("AssociationMatrix: action out of range");
    actions_[static_cast<std::size_t>(k)] = a;
  }
  bool active(int k) const { return action(k) != 0; }
  // 0-based serving AP; -1 when idle
  int serving_ap(int k) const { return action(k) - 1; }
  const std::vector<int>& actions() const { return actions_; }

  std::vector<int> ap_load() const {
    std::vector<int> load(static_cast<std::size_t>(n_aps_), 0);
    for (int a : actions_)
      if (a != 0) ++load[static_cast<std::size_t>(a - 1)];
    return load;
  }
  bool respects_capacity(int ap_capacity) const {
    for (int l : ap_load())
      if (l > ap_capacity) return false;
    return true;
  }
  bool respects_candidates(const Deployment& dep) const {
    for (int k = 0; k < n_ues(); ++k) {
      if (!active(k)) continue;
      const auto& cand = dep.candidate_sets[static_cast<std::size_t>(k)];
      bool found = false;
      for (int c : cand)
        if (c == serving_ap(k)) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  }
  bool operator==(const AssociationMatrix& o) const {
    return n_aps_ == o.n_aps_ && actions_ == o.actions_;
  }

 private:
  int n_aps_ = 0;
  std::vector<int> actions_;
};

struct ExhaustiveResult {
  AssociationMatrix assoc;
  double g2 = 0.0;
  std::uint64_t candidates_enumerated = 0;  // product of per-UE option counts
  std::uint64_t candidates_evaluated = 0;   // those passing the capacity check
};

// Scores every action vector in prod_k ({0} u A_k), filters the per-AP
// capacity constraint, and returns the G2-argmin (ties: lexicographically
// smallest action vector). Throws SearchSpaceError when the space exceeds
// 2^exhaustive_guard_bits. `jobs` > 1 parallelizes the scan (same result).
ExhaustiveResult exhaustive_p2(const SlotContext& ctx,
                               const SlotRadioContext& radio,
                               const RadioGeometry& geom,
                               const Deployment& dep, int jobs = 1);

// Bernoulli(p) activity; active UEs request their strongest-beacon candidate
// AP; over-subscribed APs keep the strongest ap_capacity requesters.
AssociationMatrix max_snr_heuristic(double p_duty,
                                    const SlotRadioContext& radio,
                                    const Deployment& dep,
                                    const ScenarioConfig& config, Rng& rng);

// Realizes the capacity constraint for arbitrary requested actions: per AP,
// admit up to ap_capacity requesters by descending beacon RSS (ties by UE
// index); rejected UEs idle this slot and get ACK = 0.
std::pair<AssociationMatrix, std::vector<std::uint8_t>> arbitrate_requests(
    const std::vector<int>& actions, const SlotRadioContext& radio,
    const ScenarioConfig& config);

struct CalibrationProbe {
  double p = 0.0;
  double delay_s = 0.0;
  double e_weighted = 0.0;
  bool meets_target = false;
};

struct CalibrationResult {
  double p_star = 0.0;
  std::vector<CalibrationProbe> probes;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Smallest duty cycle on the 0.05 grid meeting the delay target, refined by
// bisection to 0.01 resolution; each probe averages `deployments` runs of
// `slots` slots. Throws CalibrationError when even p=1 misses the target.
CalibrationResult calibrate_duty_cycle(const ScenarioConfig& config,
                                       double target_delay_s,
                                       std::int64_t slots = 5000,
                                       int deployments = 4,
                                       std::uint64_t seed = 1, int jobs = 1);

}  // namespace edgeoff
