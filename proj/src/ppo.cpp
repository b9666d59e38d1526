#include "edgeoff/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgeoff {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

PpoStats ppo_update(PolicyParameters& pp, AdamState& adam,
                    const std::vector<Sample>& batch, const MarlConfig& marl,
                    Rng& shuffle_rng) {
  PpoStats stats;
  const int n = static_cast<int>(batch.size());
  if (n == 0) return stats;

  std::vector<double> adv(n);
  for (int i = 0; i < n; ++i) adv[i] = batch[i].reward - batch[i].value_old;
  double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= n;
  const double inv_std = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& a : adv) a = (a - mean) * inv_std;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  PolicyWorkspace ws;
  PolicyBackward bw;
  const int actions = pp.action_dim();
  std::vector<double> d_logits(actions);

  const double clip = marl.ppo_clip;
  double kl_sum = 0.0;
  int kl_count = 0;

  for (int epoch = 0; epoch < marl.ppo_epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.below(i + 1)]);

    const bool last_epoch = epoch == marl.ppo_epochs - 1;
    for (int start = 0; start < n; start += marl.minibatch_size) {
      const int mb = std::min(marl.minibatch_size, n - start);
      const double inv_mb = 1.0 / mb;
      pp.params.zero_grad();

      double mb_policy = 0.0, mb_value = 0.0, mb_entropy = 0.0;
      int mb_clipped = 0;
      for (int s = 0; s < mb; ++s) {
        const int idx = order[start + s];
        const Sample& smp = batch[idx];
        policy_forward(pp, smp.radio_obs.data(), smp.mec_all.data(),
                       smp.agent_count, smp.receiver_idx, smp.mask.data(), ws);

        const double a_hat = adv[idx];
        const double logp_new = ws.logp[smp.action];
        const double ratio = std::exp(logp_new - smp.logp_old);
        const double surr1 = ratio * a_hat;
        const double clipped =
            std::clamp(ratio, 1.0 - clip, 1.0 + clip) * a_hat;
        mb_policy += -std::min(surr1, clipped) * inv_mb;
        if (std::abs(ratio - 1.0) > clip) ++mb_clipped;
        if (last_epoch) {
          kl_sum += smp.logp_old - logp_new;
          ++kl_count;
        }

        // d(-min(surr1, clipped))/dlogp: active only when the unclipped
        // branch is the minimum
        const double g_lp = surr1 <= clipped ? -a_hat * ratio * inv_mb : 0.0;

        double entropy = 0.0;
        for (int j = 0; j < actions; ++j)
          if (ws.probs[j] > 0.0) entropy -= ws.probs[j] * ws.logp[j];
        mb_entropy += entropy * inv_mb;

        for (int j = 0; j < actions; ++j) {
          const double pj = ws.probs[j];
          if (pj <= 0.0) {
            d_logits[j] = 0.0;
            continue;
          }
          double g = g_lp * ((j == smp.action ? 1.0 : 0.0) - pj);
          g += marl.entropy_coef * pj * (ws.logp[j] + entropy) * inv_mb;
          d_logits[j] = g;
        }

        const double verr = ws.value - smp.reward;
        mb_value += marl.value_coef * verr * verr * inv_mb;
        const double d_value = 2.0 * marl.value_coef * verr * inv_mb;

        policy_backward(pp, smp.radio_obs.data(), smp.mec_all.data(),
                        smp.agent_count, smp.receiver_idx, smp.mask.data(), ws,
                        d_logits.data(), d_value, bw);
      }

      if (!std::isfinite(mb_policy) || !std::isfinite(mb_value) ||
          !std::isfinite(mb_entropy) ||
          !all_finite(pp.params.grad_vector())) {
        pp.params.zero_grad();
        stats.aborted = true;
        return stats;
      }

      adam_step(pp.params, adam, marl.learning_rate);
      ++stats.minibatches;
      stats.policy_loss += mb_policy;
      stats.value_loss += mb_value;
      stats.entropy += mb_entropy;
      stats.clip_fraction += static_cast<double>(mb_clipped) / mb;
    }
  }

  if (stats.minibatches > 0) {
    stats.policy_loss /= stats.minibatches;
    stats.value_loss /= stats.minibatches;
    stats.entropy /= stats.minibatches;
    stats.clip_fraction /= stats.minibatches;
  }
  if (kl_count > 0) stats.approx_kl = kl_sum / kl_count;
  return stats;
}

}  // namespace edgeoff
