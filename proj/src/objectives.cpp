#include "edgeoff/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edgeoff/energy.hpp"

namespace edgeoff {

double eval_G1(const SlotContext& ctx, double f_c,
               std::span<const double> f_k) {
  const ScenarioConfig& cfg = *ctx.config;
  const QueueSet& q = *ctx.queues;
  if (static_cast<int>(f_k.size()) != q.n_ues())
    throw std::invalid_argument("eval_G1: share count != n_ues");
  double share_sum = 0.0;
  for (double f : f_k) {
    if (!(f >= 0.0)) throw std::invalid_argument("eval_G1: negative share");
    share_sum += f;
  }
  if (share_sum > f_c + 1e-9 * cfg.f_max())
    throw std::invalid_argument("eval_G1: shares exceed the core budget");

  const double es = es_energy(f_c, cfg);  // throws when f_c is not in F
  const double coef = cfg.tau_g1() * cfg.units_per_cycle;
  double sum = 0.0;
  for (int k = 0; k < q.n_ues(); ++k) {
    const double served = coef * f_k[static_cast<std::size_t>(k)];
    const double qs = static_cast<double>(q.q_server[k]);
    sum += -2.0 * qs * served + std::max(0.0, qs - served + 1.0) * q.z[k];
  }
  return ctx.omega * ctx.alpha[2] * es + sum;
}

double eval_G2_terms(const SlotContext& ctx,
                     std::span<const std::int64_t> uplink_units_per_ue,
                     double e_ue, double e_ap) {
  const QueueSet& q = *ctx.queues;
  if (static_cast<int>(uplink_units_per_ue.size()) != q.n_ues())
    throw std::invalid_argument("eval_G2_terms: unit count != n_ues");
  double sum = 0.0;
  for (int k = 0; k < q.n_ues(); ++k) {
    const double nu =
        static_cast<double>(uplink_units_per_ue[static_cast<std::size_t>(k)]);
    const double ql = static_cast<double>(q.q_local[k]);
    const double qs = static_cast<double>(q.q_server[k]);
    sum += (-1.5 * ql + qs) * nu + std::max(0.0, ql - nu) * q.z[k];
  }
  return ctx.omega * (ctx.alpha[0] * e_ue + ctx.alpha[1] * e_ap) + sum;
}

double eval_G2_core(const SlotContext& ctx, const int* actions,
                    const SlotRadioContext& radio, const RadioGeometry& geom,
                    G2Scratch& scratch) {
  const ScenarioConfig& cfg = *ctx.config;
  const QueueSet& q = *ctx.queues;
  const int K = radio.n_ues;
  const int N = radio.n_aps;
  scratch.uplink_units.assign(static_cast<std::size_t>(K), 0);

  const double tau = cfg.slot_duration;
  const double beta = cfg.signaling_fraction;
  const double unit_div = cfg.bits_per_unit;
  const double data_tau = cfg.data_fraction() * tau;

  double e_ue_sum = 0.0;
  bool ap_used[64] = {};
  for (int k = 0; k < K; ++k) {
    if (actions[k] == 0) {
      e_ue_sum += tau * ((1.0 - beta) * cfg.ue_power_off +
                         beta * cfg.ue_power_on);
      continue;
    }
    const int n = actions[k] - 1;
    ap_used[n] = true;
    const double signal = radio.sig_at(k, n);
    double interference = 0.0;
    for (int kp = 0; kp < K; ++kp) {
      if (kp == k || actions[kp] == 0) continue;
      interference +=
          radio.emit_at(kp, actions[kp] - 1, n) * geom.rx_gain(n, k, kp);
    }
    const double sinr = signal / (interference + radio.noise_floor);
    const double rate = cfg.bandwidth * std::log2(1.0 + sinr);
    scratch.uplink_units[static_cast<std::size_t>(k)] =
        static_cast<std::int64_t>(std::floor(data_tau * rate / unit_div));
    e_ue_sum += tau * ((1.0 - beta) * (cfg.ue_power_on + radio.ptx_at(k, n)) +
                       beta * cfg.ue_power_on);
  }

  double e_ap_sum = 0.0;
  for (int n = 0; n < N; ++n) {
    const double p = ap_used[n] ? cfg.ap_power_on : cfg.ap_power_off;
    e_ap_sum += tau * ((1.0 - beta) * p + beta * cfg.ap_power_on);
  }
  scratch.e_ue = e_ue_sum;
  scratch.e_ap = e_ap_sum;

  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const double nu =
        static_cast<double>(scratch.uplink_units[static_cast<std::size_t>(k)]);
    const double ql = static_cast<double>(q.q_local[k]);
    const double qs = static_cast<double>(q.q_server[k]);
    sum += (-1.5 * ql + qs) * nu + std::max(0.0, ql - nu) * q.z[k];
  }
  return ctx.omega * (ctx.alpha[0] * e_ue_sum + ctx.alpha[1] * e_ap_sum) + sum;
}

double eval_G2(const SlotContext& ctx, const AssociationMatrix& assoc,
               const SlotRadioContext& radio, const RadioGeometry& geom,
               const Deployment& dep) {
  if (assoc.n_ues() != radio.n_ues)
    throw std::invalid_argument("eval_G2: association size mismatch");
  if (!assoc.respects_capacity(ctx.config->ap_capacity))
    throw std::invalid_argument("eval_G2: association violates AP capacity");
  if (!assoc.respects_candidates(dep))
    throw std::invalid_argument(
        "eval_G2: association uses an AP outside a candidate set");
  if (radio.n_aps > 64)
    throw std::invalid_argument("eval_G2: more than 64 APs unsupported");
  G2Scratch scratch;
  return eval_G2_core(ctx, assoc.actions().data(), radio, geom, scratch);
}

double reward_from_g2(double g2, bool episode_failed,
                      const ScenarioConfig& config) {
  if (episode_failed) return config.fail_reward;
  return -g2 / config.reward_scale;
}

}  // namespace edgeoff
