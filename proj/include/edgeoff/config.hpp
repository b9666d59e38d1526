#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgeoff {

// Thrown for any malformed/invalid configuration; carries the offending key
// (empty when the problem is not tied to a single key).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string key = "")
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Hyperparameters of the learned association policy and its PPO trainer.
struct MarlConfig {
  int hidden_m = 128;          // encoder/message width m
  double learning_rate = 1e-4;
  double ppo_clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int ppo_epochs = 4;
  int batch_size = 2048;       // agent-steps per update
  int minibatch_size = 256;
  int episode_slots = 200;
  int train_episodes = 1500;
  int eval_interval = 25;      // episodes between validation passes
  int eval_deployments = 16;
  int eval_slots = 1000;
  double neighborhood_radius = 0.0;  // meters; 0 means fully connected
};

// Every physical and protocol constant for one experiment. Core fields are
// required in config files; the extended block below them is optional and
// defaulted. Unknown keys in a file are an error.
struct ScenarioConfig {
  // --- core schema -------------------------------------------------------
  int n_ues = 6;                      // K
  int n_aps = 3;                      // N
  double slot_duration = 0.01;        // tau, s
  double signaling_fraction = 0.1;    // beta
  double bandwidth = 1e7;             // B, Hz
  double noise_psd = 3.981071705534985e-21;  // N0, W/Hz (-174 dBm/Hz)
  double bits_per_unit = 1500.0;      // S, bits per data unit
  double units_per_cycle = 1e-3;      // J, units per CPU cycle
  std::vector<double> cpu_freq_set =  // F, Hz; must contain 0, ascending
      {0.0, 1e8, 2e8, 3e8, 4e8, 5e8, 6e8, 7e8, 8e8, 9e8, 1e9};
  double switched_capacitance = 1e-27;  // kappa, W*s^3/cycle^3
  double ue_power_on = 0.9;           // W
  double ue_power_off = 0.346;        // W
  double ap_power_on = 2.2;           // W
  double ap_power_off = 0.278;        // W
  double es_power_on = 20.0;          // W
  double es_power_off = 10.0;         // W
  double max_tx_power = 0.1;          // p_max, W
  double target_snr_db = 15.0;        // uplink power-control target
  int ap_capacity = 15;               // N_n, max UEs per AP
  double arrival_mean = 50.0;         // units per slot per UE
  double delay_target = 0.1;          // L_avg, s
  double lyapunov_weight = 1e9;       // Omega
  std::array<double, 3> energy_weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double cell_radius = 50.0;          // R_0, m
  double inter_cell_distance = 60.0;  // m (1.2 * R_0 by default)
  double pathloss_exponent = 2.5;
  double shadowing_variance_db = 12.0;  // variance of the dB-domain shadowing
  double backlobe_gain_db = -20.0;      // relative to max antenna gain
  std::uint64_t rng_seed = 1;

  // --- extended knobs (optional in files) --------------------------------
  double epsilon1 = 10.0;   // queue clip: Q_clip = (1+eps1) * Q_avg
  double epsilon2 = 0.0;    // virtual clip: Z_clip = (1+eps2) * Q_avg^2
  bool consistent_tau = false;  // use (1-beta)*tau inside the P1 objective
  double reward_scale = 1e6;    // r = -G2 / reward_scale
  double fail_reward = -10.0;   // reward on an episode-failure slot
  double ue_max_gain_db = 10.0;
  double ap_max_gain_db = 10.0;
  double ue_beamwidth_deg = 30.0;
  double ap_beamwidth_deg = 30.0;
  double candidate_radius_factor = 1.5;  // A_k = APs within factor * R_0
  double exhaustive_guard_bits = 24.0;   // refuse searches above 2^bits
  double rss_offset_dbm = -60.0;         // observation normalization
  double rss_scale_db = 20.0;
  MarlConfig marl;

  // --- derived helpers ----------------------------------------------------
  double f_max() const { return cpu_freq_set.empty() ? 0.0 : cpu_freq_set.back(); }
  // tau used inside the G1 objective; execution (Eq.-2 style service) always
  // uses (1-beta)*tau regardless of this switch
  double tau_g1() const {
    return consistent_tau ? (1.0 - signaling_fraction) * slot_duration
                          : slot_duration;
  }
  double data_fraction() const { return 1.0 - signaling_fraction; }
  double target_snr_linear() const {
    return std::pow(10.0, target_snr_db / 10.0);
  }
  double noise_floor_w() const { return noise_psd * bandwidth; }

  void validate() const;  // throws ConfigError on any violated invariant

  static ScenarioConfig defaults() { return ScenarioConfig{}; }
  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig from_json_file(const std::string& path);
  std::string to_json_text() const;  // canonical form (sorted keys)
  std::uint64_t hash() const;        // FNV-1a of the canonical form
};

}  // namespace edgeoff
