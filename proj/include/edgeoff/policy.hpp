#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgeoff/association.hpp"
#include "edgeoff/config.hpp"
#include "edgeoff/deployment.hpp"
#include "edgeoff/nn.hpp"
#include "edgeoff/queueing.hpp"
#include "edgeoff/radio.hpp"
#include "edgeoff/rng.hpp"

namespace edgeoff {

// Fixed observation scalings, recorded in checkpoints so a policy keeps the
// input distribution it was trained with when evaluated elsewhere.
struct NormConstants {
  double rate_norm = 1.0;       // B*log2(1 + snr_lin*K) at creation time
  double rss_offset_dbm = -60.0;
  double rss_scale_db = 20.0;
  double pos_norm = 50.0;       // R_0
  double f_norm = 1e9;          // f_max

  static NormConstants from_config(const ScenarioConfig& config);
};

// Shared-parameter actor-critic with attention message passing. Weight
// shapes depend on N (action head) and m only - never on the UE count.
struct PolicyParameters {
  int m = 128;
  int n_aps = 3;
  NormConstants norms;
  ParamVector params;

  static constexpr int mec_dim = 6;
  int radio_dim() const { return 3 * n_aps + 4; }
  int action_dim() const { return n_aps + 1; }

  static PolicyParameters create(int m, int n_aps, const NormConstants& norms,
                                 Rng& rng);
  void save(const std::string& path) const;
  static PolicyParameters load(const std::string& path);
};

// Forward-pass intermediates for one receiver, kept for the backward pass.
struct PolicyWorkspace {
  int agent_count = 0;
  std::vector<double> qry, val;        // agent_count x m
  std::vector<double> key_r;           // m (receiver only)
  std::vector<double> u_pre, u;        // m
  std::vector<double> scores, alpha;   // agent_count
  std::vector<double> v;               // m
  std::vector<double> ctx_in;          // 2m
  std::vector<double> ctx_pre, c;      // m
  std::vector<double> act1_pre, act1;  // 2m
  std::vector<double> logits, logp, probs;  // action_dim
  std::vector<double> cri1_pre, cri1;  // 2m
  double value = 0.0;
};

// Scratch for backward (sized like the workspace).
struct PolicyBackward {
  std::vector<double> d_c, d_ctx_pre, d_ctx_in, d_u, d_v;
  std::vector<double> d_act1, d_cri1;
  std::vector<double> d_scores, d_alpha;
  std::vector<double> d_key_r, d_qv;
};

// One receiver's forward pass. mec_obs_all holds the MEC observations of the
// receiver's whole neighborhood (agent_count rows of 6), receiver_idx points
// at the receiver's own row. Fills ws (probs/logp over actions, value).
void policy_forward(const PolicyParameters& pp, const double* radio_obs,
                    const double* mec_obs_all, int agent_count,
                    int receiver_idx, const std::uint8_t* mask,
                    PolicyWorkspace& ws);

// Accumulates parameter gradients for the same sample given loss gradients
// w.r.t. the logits and the value output.
void policy_backward(PolicyParameters& pp, const double* radio_obs,
                     const double* mec_obs_all, int agent_count,
                     int receiver_idx, const std::uint8_t* mask,
                     const PolicyWorkspace& ws, const double* d_logits,
                     double d_value, PolicyBackward& bw);

enum class ActMode { sample, greedy };

// Draw or argmax an action from ws.probs (ties toward the smaller index).
int act_from(const PolicyWorkspace& ws, ActMode mode, Rng& rng);

// --- observation assembly -------------------------------------------------

// Previous-slot feedback each UE remembers for its radio observation.
struct ObsMemory {
  std::vector<int> prev_action;     // 0..N
  std::vector<double> prev_rate;    // bit/s (0 when idle or rejected)
  std::vector<std::uint8_t> prev_ack;
  std::vector<double> prev_share;   // f_k of the previous slot, cycle/s
  double prev_sum_rate = 0.0;

  void reset(int n_ues) {
    prev_action.assign(static_cast<std::size_t>(n_ues), 0);
    prev_rate.assign(static_cast<std::size_t>(n_ues), 0.0);
    prev_ack.assign(static_cast<std::size_t>(n_ues), 0);
    prev_share.assign(static_cast<std::size_t>(n_ues), 0.0);
    prev_sum_rate = 0.0;
  }
};

// layout: [one-hot prev action (N+1)] [prev own rate] [prev sum rate]
//         [prev ACK] [RSS dBm normalized, -1 pad] [AoA / pi, -1 pad]
void build_radio_observation(int k, const ObsMemory& mem,
                             const SlotRadioContext& radio,
                             const Deployment& dep, const NormConstants& norms,
                             double* out, int n_aps);

// layout: [x/R0, y/R0, f_prev/f_max, Q^l/Q_clip, Q^s/Q_clip, Z/Z_clip]
void build_mec_observation(int k, const QueueSet& queues, const ObsMemory& mem,
                           const Deployment& dep, const NormConstants& norms,
                           double* out6);

// mask over actions {idle} u {1+a : a in A_k}; idle always allowed
void build_action_mask(int k, const Deployment& dep, int n_aps,
                       std::uint8_t* mask);

// neighborhood of k (always contains k); radius 0 = everyone
std::vector<int> neighborhood_of(int k, const Deployment& dep, double radius);

}  // namespace edgeoff
