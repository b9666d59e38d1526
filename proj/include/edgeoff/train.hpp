#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "edgeoff/config.hpp"
#include "edgeoff/policy.hpp"
#include "edgeoff/ppo.hpp"
#include "edgeoff/sim.hpp"

namespace edgeoff {

struct TrainOptions {
  int episodes = 0;      // 0: config.marl.train_episodes
  std::uint64_t seed = 1;
  int jobs = 1;          // validation-run parallelism
  double time_budget_s = 0.0;  // 0: unlimited
  std::ostream* curve = nullptr;
  std::ostream* validation = nullptr;
  std::ostream* log = nullptr;
};

struct EpisodeRow {
  int episode = 0;
  std::int64_t slots = 0;
  double mean_reward = 0.0;
  bool failed = false;       // ended early on a clip violation
  double failure_rate = 0.0;  // over the trailing 20 episodes
  double mean_delay_s = 0.0;
  double mean_energy = 0.0;  // weighted J/slot over the episode
  double policy_loss = 0.0, value_loss = 0.0, entropy = 0.0;
  double clip_fraction = 0.0, approx_kl = 0.0;
  bool updated = false;  // a PPO update ran after this episode
};

struct ValidationRow {
  int episode = 0;
  double delay_s = 0.0;
  double e_weighted = 0.0;
  double violation_rate = 0.0;
  double score = 0.0;
  bool best_so_far = false;
};

struct TrainResult {
  PolicyParameters best;   // checkpoint with the best validation score
  PolicyParameters last;
  std::vector<EpisodeRow> curve;
  std::vector<ValidationRow> validations;
  double ref_delay_s = 0.0;  // exhaustive baseline on the validation set
  double best_score = 0.0;
  int episodes_run = 0;
  int aborted_updates = 0;
  bool diverged = false;  // 50 consecutive failure-terminated episodes
};

inline constexpr const char* train_curve_header =
    "episode,slots,mean_reward,failed,failure_rate,mean_delay_s,mean_energy,"
    "policy_loss,value_loss,entropy,clip_fraction,approx_kl,updated";
inline constexpr const char* train_validation_header =
    "episode,delay_s,e_weighted,violation_rate,ref_delay_s,score,best";

// Episode-based PPO training: fresh deployment per episode, stochastic
// policy, random CPU scheduling for exploration, updates between episodes
// once the sample buffer reaches marl.batch_size. Greedy validation against
// an exhaustive-search reference picks the checkpoint to keep.
TrainResult train_policy(const ScenarioConfig& config,
                         const TrainOptions& opt);

}  // namespace edgeoff
