#pragma once

#include <cstdint>
#include <vector>

#include "edgeoff/config.hpp"
#include "edgeoff/nn.hpp"
#include "edgeoff/policy.hpp"
#include "edgeoff/rng.hpp"

namespace edgeoff {

// One agent-slot experience. mec_all carries the whole neighborhood so the
// attention pass can be replayed exactly during the update.
struct Sample {
  std::vector<double> radio_obs;
  std::vector<double> mec_all;     // agent_count x 6
  std::vector<std::uint8_t> mask;  // action_dim
  int agent_count = 0;
  int receiver_idx = 0;
  int action = 0;
  double logp_old = 0.0;
  double value_old = 0.0;
  double reward = 0.0;
};

struct PpoStats {
  int minibatches = 0;
  double policy_loss = 0.0;   // mean clipped surrogate (sign: loss)
  double value_loss = 0.0;    // mean value_coef * (V - r)^2
  double entropy = 0.0;       // mean policy entropy
  double clip_fraction = 0.0;
  double approx_kl = 0.0;     // mean(logp_old - logp_new), last epoch
  bool aborted = false;       // non-finite loss or gradient; step not applied
};

// Clipped-surrogate PPO with one-step returns (advantage = reward - V_old),
// batch-normalized advantages, entropy bonus, and a squared-error critic.
// Consumes `batch` in shuffled minibatches for marl.ppo_epochs epochs.
PpoStats ppo_update(PolicyParameters& pp, AdamState& adam,
                    const std::vector<Sample>& batch, const MarlConfig& marl,
                    Rng& shuffle_rng);

}  // namespace edgeoff
