#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edgeoff/association.hpp"
#include "edgeoff/config.hpp"
#include "edgeoff/queueing.hpp"
#include "edgeoff/radio.hpp"

namespace edgeoff {

// Frozen per-slot inputs shared by both surrogate objectives.
struct SlotContext {
  const QueueSet* queues = nullptr;
  double omega = 0.0;
  std::array<double, 3> alpha{0.0, 0.0, 0.0};
  const ScenarioConfig* config = nullptr;

  static SlotContext of(const QueueSet& q, const ScenarioConfig& c) {
    return SlotContext{&q, c.lyapunov_weight, c.energy_weights, &c};
  }
};

// CPU-scheduling surrogate:
//   G1 = Omega*alpha3*E_s(f_c)
//      + sum_k [ -2*Q^s_k*(tau*f_k*J) + max(0, Q^s_k - tau*f_k*J + 1)*Z_k ]
// (tau per the consistent_tau switch). Throws on infeasible (f_c, f_k).
double eval_G1(const SlotContext& ctx, double f_c,
               std::span<const double> f_k);

// Association surrogate, low-level form with precomputed uplink units and
// energies:
//   G2 = Omega*(alpha1*E_u + alpha2*E_a)
//      + sum_k [ (-3/2*Q^l_k + Q^s_k)*N^u_k + max(0, Q^l_k - N^u_k)*Z_k ]
double eval_G2_terms(const SlotContext& ctx,
                     std::span<const std::int64_t> uplink_units_per_ue,
                     double e_ue, double e_ap);

// Full form: recomputes SINR/rates/energies under `assoc` and validates the
// association constraints (binary actions, candidate sets, AP capacity).
double eval_G2(const SlotContext& ctx, const AssociationMatrix& assoc,
               const SlotRadioContext& radio, const RadioGeometry& geom,
               const Deployment& dep);

// Reusable buffers for scoring many candidates without allocation.
struct G2Scratch {
  std::vector<std::int64_t> uplink_units;
  double e_ue = 0.0;
  double e_ap = 0.0;
};

// Scoring core shared by eval_G2 and the exhaustive scan (identical
// arithmetic, no feasibility checks, no allocation beyond the scratch).
double eval_G2_core(const SlotContext& ctx, const int* actions,
                    const SlotRadioContext& radio, const RadioGeometry& geom,
                    G2Scratch& scratch);

// r = -G2/reward_scale, replaced by the fixed penalty on failure slots
double reward_from_g2(double g2, bool episode_failed,
                      const ScenarioConfig& config);

}  // namespace edgeoff
