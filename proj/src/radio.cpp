#include "edgeoff/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgeoff/association.hpp"

namespace edgeoff {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kCarrierHz = 28e9;  // mmWave band assumed by the pathloss ref

// free-space power gain at the 1 m reference distance
double freespace_ref_1m() {
  const double lambda = kSpeedOfLight / kCarrierHz;
  const double r = lambda / (4.0 * std::numbers::pi);
  return r * r;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double wrap_angle(double a) {
  // into (-pi, pi]
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace

AntennaPattern ue_pattern(const ScenarioConfig& config) {
  AntennaPattern p;
  p.max_gain_linear = db_to_linear(config.ue_max_gain_db);
  p.beamwidth_rad = config.ue_beamwidth_deg * std::numbers::pi / 180.0;
  p.backlobe_linear = db_to_linear(config.backlobe_gain_db);
  return p;
}

AntennaPattern ap_pattern(const ScenarioConfig& config) {
  AntennaPattern p;
  p.max_gain_linear = db_to_linear(config.ap_max_gain_db);
  p.beamwidth_rad = config.ap_beamwidth_deg * std::numbers::pi / 180.0;
  p.backlobe_linear = db_to_linear(config.backlobe_gain_db);
  return p;
}

double antenna_gain(double boresight_angle, double direction_angle,
                    const AntennaPattern& pattern) {
  const double off = wrap_angle(direction_angle - boresight_angle);
  const double x = 2.0 * off / pattern.beamwidth_rad;
  const double lobe = std::exp(-std::numbers::ln2 * x * x);
  return pattern.max_gain_linear * std::max(pattern.backlobe_linear, lobe);
}

ChannelSnapshot draw_channels(const Deployment& dep,
                              const ScenarioConfig& config, Rng& rng) {
  ChannelSnapshot snap;
  snap.n_ues = static_cast<int>(dep.ue_positions.size());
  snap.n_aps = static_cast<int>(dep.ap_positions.size());
  snap.gain.resize(static_cast<std::size_t>(snap.n_ues) * snap.n_aps);
  snap.shadowing_db.resize(snap.gain.size());
  const double ref = freespace_ref_1m();
  const double shadow_std = std::sqrt(config.shadowing_variance_db);
  for (int k = 0; k < snap.n_ues; ++k) {
    for (int n = 0; n < snap.n_aps; ++n) {
      // clamp below the 1 m reference so the model never amplifies
      const double d =
          std::max(1.0, distance(dep.ue_positions[k], dep.ap_positions[n]));
      const double pl = ref * std::pow(d, -config.pathloss_exponent);
      const double x = shadow_std == 0.0 ? 0.0 : rng.normal(0.0, shadow_std);
      const std::size_t i = static_cast<std::size_t>(k) * snap.n_aps + n;
      snap.shadowing_db[i] = x;
      snap.gain[i] = pl * std::pow(10.0, x / 10.0);
    }
  }
  return snap;
}

RadioGeometry RadioGeometry::build(const Deployment& dep,
                                   const ScenarioConfig& config) {
  RadioGeometry g;
  g.n_ues = static_cast<int>(dep.ue_positions.size());
  g.n_aps = static_cast<int>(dep.ap_positions.size());
  const int K = g.n_ues, N = g.n_aps;
  g.dist.resize(static_cast<std::size_t>(K) * N);
  g.angle_ue_ap.resize(static_cast<std::size_t>(K) * N);
  g.angle_ap_ue.resize(static_cast<std::size_t>(N) * K);
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) {
      const Vec2& u = dep.ue_positions[k];
      const Vec2& a = dep.ap_positions[n];
      g.dist[k * N + n] = distance(u, a);
      g.angle_ue_ap[k * N + n] = std::atan2(a.y - u.y, a.x - u.x);
      g.angle_ap_ue[n * K + k] = std::atan2(u.y - a.y, u.x - a.x);
    }

  const AntennaPattern up = ue_pattern(config);
  const AntennaPattern app = ap_pattern(config);
  g.ue_max_gain = up.max_gain_linear;
  g.ap_max_gain = app.max_gain_linear;

  g.g_ue.resize(static_cast<std::size_t>(K) * N * N);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < N; ++m)
      for (int n = 0; n < N; ++n)
        g.g_ue[(k * N + m) * N + n] =
            antenna_gain(g.angle_ue_ap[k * N + m], g.angle_ue_ap[k * N + n],
                         up);

  g.g_ap.resize(static_cast<std::size_t>(N) * K * K);
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k)
      for (int kp = 0; kp < K; ++kp)
        g.g_ap[(n * K + k) * K + kp] =
            antenna_gain(g.angle_ap_ue[n * K + k], g.angle_ap_ue[n * K + kp],
                         app);
  return g;
}

double uplink_tx_power(int k, int serving_ap, const ChannelSnapshot& snap,
                       const RadioGeometry& geom,
                       const ScenarioConfig& config) {
  const double gch = snap.gain_at(k, serving_ap);
  const double combined = geom.ue_max_gain * gch * geom.ap_max_gain;
  if (!(combined > 0.0) || !std::isfinite(combined)) return config.max_tx_power;
  const double p_tg =
      config.target_snr_linear() * config.noise_floor_w() / combined;
  return std::min(p_tg, config.max_tx_power);
}

std::int64_t uplink_units(double rate_bps, const ScenarioConfig& config) {
  if (rate_bps < 0.0)
    throw std::invalid_argument("uplink_units: negative rate");
  return static_cast<std::int64_t>(std::floor(
      config.data_fraction() * config.slot_duration * rate_bps /
      config.bits_per_unit));
}

SlotRadioContext SlotRadioContext::build(const RadioGeometry& geom,
                                         const ChannelSnapshot& snap,
                                         const ScenarioConfig& config) {
  SlotRadioContext ctx;
  const int K = geom.n_ues, N = geom.n_aps;
  ctx.n_ues = K;
  ctx.n_aps = N;
  ctx.noise_floor = config.noise_floor_w();
  ctx.ptx.resize(static_cast<std::size_t>(K) * N);
  ctx.sig.resize(static_cast<std::size_t>(K) * N);
  ctx.rss_w.resize(static_cast<std::size_t>(K) * N);
  ctx.emit.resize(static_cast<std::size_t>(K) * N * N);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < N; ++m) {
      const double p = uplink_tx_power(k, m, snap, geom, config);
      const double gch_m = snap.gain_at(k, m);
      ctx.ptx[k * N + m] = p;
      // grouping matters: identical expressions are used by the reference
      // path so the two agree bit-for-bit
      ctx.sig[k * N + m] = p * geom.ue_max_gain * gch_m * geom.ap_max_gain;
      ctx.rss_w[k * N + m] =
          config.max_tx_power * geom.ue_max_gain * gch_m * geom.ap_max_gain;
      for (int n = 0; n < N; ++n)
        ctx.emit[(k * N + m) * N + n] =
            p * geom.tx_gain(k, m, n) * snap.gain_at(k, n);
    }
  }
  return ctx;
}

std::vector<LinkBudget> compute_sinr_and_rate(const AssociationMatrix& assoc,
                                              const ChannelSnapshot& snap,
                                              const RadioGeometry& geom,
                                              const ScenarioConfig& config) {
  const int K = snap.n_ues;
  std::vector<LinkBudget> out(static_cast<std::size_t>(K));
  std::vector<double> ptx(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k)
    if (assoc.active(k))
      ptx[k] = uplink_tx_power(k, assoc.serving_ap(k), snap, geom, config);

  const double noise = config.noise_floor_w();
  for (int k = 0; k < K; ++k) {
    LinkBudget& lb = out[static_cast<std::size_t>(k)];
    if (!assoc.active(k)) continue;
    const int n = assoc.serving_ap(k);
    lb.active = true;
    lb.serving_ap = n;
    lb.tx_power = ptx[k];
    lb.tx_gain = geom.ue_max_gain;
    lb.rx_gain = geom.ap_max_gain;
    const double signal =
        ptx[k] * geom.ue_max_gain * snap.gain_at(k, n) * geom.ap_max_gain;
    double interference = 0.0;
    for (int kp = 0; kp < K; ++kp) {
      if (kp == k || !assoc.active(kp)) continue;
      const int m = assoc.serving_ap(kp);
      interference +=
          ptx[kp] * geom.tx_gain(kp, m, n) * snap.gain_at(kp, n) *
          geom.rx_gain(n, k, kp);
    }
    lb.interference = interference;
    lb.sinr = signal / (interference + noise);
    lb.rate = config.bandwidth * std::log2(1.0 + lb.sinr);
  }
  return out;
}

std::vector<LinkBudget> compute_sinr_and_rate_fast(
    const AssociationMatrix& assoc, const SlotRadioContext& ctx,
    const RadioGeometry& geom, const ScenarioConfig& config) {
  const int K = ctx.n_ues;
  std::vector<LinkBudget> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    LinkBudget& lb = out[static_cast<std::size_t>(k)];
    if (!assoc.active(k)) continue;
    const int n = assoc.serving_ap(k);
    lb.active = true;
    lb.serving_ap = n;
    lb.tx_power = ctx.ptx_at(k, n);
    lb.tx_gain = geom.ue_max_gain;
    lb.rx_gain = geom.ap_max_gain;
    const double signal = ctx.sig_at(k, n);
    double interference = 0.0;
    for (int kp = 0; kp < K; ++kp) {
      if (kp == k || !assoc.active(kp)) continue;
      interference +=
          ctx.emit_at(kp, assoc.serving_ap(kp), n) * geom.rx_gain(n, k, kp);
    }
    lb.interference = interference;
    lb.sinr = signal / (interference + ctx.noise_floor);
    lb.rate = config.bandwidth * std::log2(1.0 + lb.sinr);
  }
  return out;
}

}  // namespace edgeoff
