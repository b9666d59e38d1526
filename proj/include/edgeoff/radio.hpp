#pragma once

#include <cstdint>
#include <vector>

#include "edgeoff/config.hpp"
#include "edgeoff/deployment.hpp"
#include "edgeoff/rng.hpp"

namespace edgeoff {

// Directional antenna: G_max inside the main lobe with a Gaussian-shaped
// roll-off (half power at +-beamwidth/2), floored at the back-lobe level.
struct AntennaPattern {
  double max_gain_linear = 10.0;
  double beamwidth_rad = 0.5235987755982988;  // 30 deg
  double backlobe_linear = 0.01;              // relative to max gain
};

AntennaPattern ue_pattern(const ScenarioConfig& config);
AntennaPattern ap_pattern(const ScenarioConfig& config);

// gain toward `direction_angle` for a beam steered at `boresight_angle`
double antenna_gain(double boresight_angle, double direction_angle,
                    const AntennaPattern& pattern);

// Per-slot i.i.d. channel realization (pathloss + log-normal shadowing).
struct ChannelSnapshot {
  int n_ues = 0;
  int n_aps = 0;
  std::vector<double> gain;          // K*N, linear power gain
  std::vector<double> shadowing_db;  // K*N, the Gaussian dB draws
  double gain_at(int k, int n) const { return gain[k * n_aps + n]; }
};

ChannelSnapshot draw_channels(const Deployment& dep,
                              const ScenarioConfig& config, Rng& rng);

// Deployment-static geometry: distances, angles, and antenna-gain tables for
// every (transmit beam, listening direction) pair that can occur.
struct RadioGeometry {
  int n_ues = 0;
  int n_aps = 0;
  std::vector<double> dist;         // K*N
  std::vector<double> angle_ue_ap;  // K*N: direction of AP n seen from UE k
  std::vector<double> angle_ap_ue;  // N*K: direction of UE k seen from AP n
  // g_ue[(k*N + m)*N + n]: UE k's tx gain toward AP n with its beam on AP m
  std::vector<double> g_ue;
  // g_ap[(n*K + k)*K + kp]: AP n's rx gain toward UE kp with its beam on UE k
  std::vector<double> g_ap;
  double ue_max_gain = 10.0;
  double ap_max_gain = 10.0;

  static RadioGeometry build(const Deployment& dep,
                             const ScenarioConfig& config);
  double tx_gain(int k, int beam_ap, int toward_ap) const {
    return g_ue[(k * n_aps + beam_ap) * n_aps + toward_ap];
  }
  double rx_gain(int ap, int beam_ue, int toward_ue) const {
    return g_ap[(ap * n_ues + beam_ue) * n_ues + toward_ue];
  }
};

// One UE's uplink outcome for a slot.
struct LinkBudget {
  bool active = false;
  int serving_ap = -1;   // 0-based; -1 when idle
  double tx_power = 0.0;  // W
  double tx_gain = 0.0;
  double rx_gain = 0.0;
  double interference = 0.0;  // W
  double sinr = 0.0;          // linear
  double rate = 0.0;          // bit/s
};

// target-SNR power control: min(p_tg, p_max); degenerate gain -> p_max
double uplink_tx_power(int k, int serving_ap, const ChannelSnapshot& snap,
                       const RadioGeometry& geom, const ScenarioConfig& config);

// units that fit in the data fraction of one slot at rate R
std::int64_t uplink_units(double rate_bps, const ScenarioConfig& config);

// Precomputed per-slot quantities so candidate associations can be scored
// with O(K^2) work each: power-controlled tx powers, received signal powers,
// and interference emissions before receiver gain.
struct SlotRadioContext {
  int n_ues = 0;
  int n_aps = 0;
  double noise_floor = 0.0;     // N0 * B, W
  std::vector<double> ptx;      // K*N: min(p_tg, p_max) for k -> n
  std::vector<double> sig;      // K*N: received signal power at n from k
  std::vector<double> emit;     // K*N*N: [k][beam m][toward n], before rx gain
  std::vector<double> rss_w;    // K*N: full-power beacon RSS, W

  static SlotRadioContext build(const RadioGeometry& geom,
                                const ChannelSnapshot& snap,
                                const ScenarioConfig& config);
  double ptx_at(int k, int n) const { return ptx[k * n_aps + n]; }
  double sig_at(int k, int n) const { return sig[k * n_aps + n]; }
  double emit_at(int k, int m, int n) const {
    return emit[(k * n_aps + m) * n_aps + n];
  }
  double rss_at(int k, int n) const { return rss_w[k * n_aps + n]; }
};

class AssociationMatrix;  // association.hpp

// Reference SINR/rate for a fixed association (serial, straightforward).
// Interferers keep their beams at their own serving APs.
std::vector<LinkBudget> compute_sinr_and_rate(const AssociationMatrix& assoc,
                                              const ChannelSnapshot& snap,
                                              const RadioGeometry& geom,
                                              const ScenarioConfig& config);

// Same quantities from the precomputed slot context; must agree bit-for-bit
// with compute_sinr_and_rate (testable fast path).
std::vector<LinkBudget> compute_sinr_and_rate_fast(
    const AssociationMatrix& assoc, const SlotRadioContext& ctx,
    const RadioGeometry& geom, const ScenarioConfig& config);

}  // namespace edgeoff
