#include "edgeoff/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "edgeoff/objectives.hpp"

namespace edgeoff {

namespace {

struct CandidateSpace {
  // per-UE sorted action options ({0} plus 1+a for a in A_k)
  std::vector<std::vector<int>> options;
  // stride[k]: number of candidates spanned by one step of UE k's digit
  std::vector<std::uint64_t> stride;
  std::uint64_t total = 1;
};

CandidateSpace build_space(const Deployment& dep, const ScenarioConfig& cfg) {
  const int K = static_cast<int>(dep.ue_positions.size());
  CandidateSpace s;
  s.options.resize(static_cast<std::size_t>(K));
  double bits = 0.0;
  for (int k = 0; k < K; ++k) {
    auto& opts = s.options[static_cast<std::size_t>(k)];
    opts.push_back(0);
    std::vector<int> cand = dep.candidate_sets[static_cast<std::size_t>(k)];
    std::sort(cand.begin(), cand.end());
    for (int a : cand) opts.push_back(a + 1);
    bits += std::log2(static_cast<double>(opts.size()));
  }
  if (bits > cfg.exhaustive_guard_bits)
    throw SearchSpaceError(
        "exhaustive search space of 2^" + std::to_string(bits) +
        " candidates exceeds the guard of 2^" +
        std::to_string(cfg.exhaustive_guard_bits));
  s.stride.assign(static_cast<std::size_t>(K), 1);
  for (int k = K - 1; k >= 0; --k) {
    if (k + 1 < K)
      s.stride[static_cast<std::size_t>(k)] =
          s.stride[static_cast<std::size_t>(k + 1)] *
          s.options[static_cast<std::size_t>(k + 1)].size();
    s.total *= s.options[static_cast<std::size_t>(k)].size();
  }
  return s;
}

// scan candidates [begin, end) in lexicographic order; returns the local best
struct ScanBest {
  double g2 = std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t evaluated = 0;
};

ScanBest scan_range(const CandidateSpace& space, const SlotContext& ctx,
                    const SlotRadioContext& radio, const RadioGeometry& geom,
                    std::uint64_t begin, std::uint64_t end) {
  const int K = static_cast<int>(space.options.size());
  const int N = radio.n_aps;
  std::vector<int> digit(static_cast<std::size_t>(K));
  std::vector<int> actions(static_cast<std::size_t>(K));
  std::uint64_t rem = begin;
  for (int k = 0; k < K; ++k) {
    const auto& opts = space.options[static_cast<std::size_t>(k)];
    const std::uint64_t d = rem / space.stride[static_cast<std::size_t>(k)];
    rem %= space.stride[static_cast<std::size_t>(k)];
    digit[static_cast<std::size_t>(k)] = static_cast<int>(d);
    actions[static_cast<std::size_t>(k)] = opts[d];
  }

  std::vector<int> load(static_cast<std::size_t>(N));
  G2Scratch scratch;
  ScanBest best;
  for (std::uint64_t i = begin; i < end; ++i) {
    std::fill(load.begin(), load.end(), 0);
    bool feasible = true;
    for (int k = 0; k < K && feasible; ++k) {
      const int a = actions[static_cast<std::size_t>(k)];
      if (a != 0 && ++load[static_cast<std::size_t>(a - 1)] >
                        ctx.config->ap_capacity)
        feasible = false;
    }
    if (feasible) {
      ++best.evaluated;
      const double g2 = eval_G2_core(ctx, actions.data(), radio, geom, scratch);
      if (g2 < best.g2 || (g2 == best.g2 && i < best.index)) {
        best.g2 = g2;
        best.index = i;
      }
    }
    // odometer increment (least-significant digit = last UE)
    for (int k = K - 1; k >= 0; --k) {
      const auto& opts = space.options[static_cast<std::size_t>(k)];
      int& d = digit[static_cast<std::size_t>(k)];
      if (++d < static_cast<int>(opts.size())) {
        actions[static_cast<std::size_t>(k)] = opts[static_cast<std::size_t>(d)];
        break;
      }
      d = 0;
      actions[static_cast<std::size_t>(k)] = opts[0];
    }
  }
  return best;
}

void decode_actions(const CandidateSpace& space, std::uint64_t index,
                    AssociationMatrix& out) {
  std::uint64_t rem = index;
  for (int k = 0; k < static_cast<int>(space.options.size()); ++k) {
    const std::uint64_t d = rem / space.stride[static_cast<std::size_t>(k)];
    rem %= space.stride[static_cast<std::size_t>(k)];
    out.set_action(k, space.options[static_cast<std::size_t>(k)][d]);
  }
}

}  // namespace

ExhaustiveResult exhaustive_p2(const SlotContext& ctx,
                               const SlotRadioContext& radio,
                               const RadioGeometry& geom,
                               const Deployment& dep, int jobs) {
  const ScenarioConfig& cfg = *ctx.config;
  if (radio.n_aps > 64)
    throw SearchSpaceError("exhaustive_p2: more than 64 APs unsupported");
  const CandidateSpace space = build_space(dep, cfg);

  ScanBest best;
  if (jobs <= 1 || space.total < 4096) {
    best = scan_range(space, ctx, radio, geom, 0, space.total);
  } else {
    const int chunks = jobs * 4;
    std::vector<ScanBest> partial(static_cast<std::size_t>(chunks));
    const std::uint64_t step = (space.total + chunks - 1) / chunks;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(jobs)
#endif
    for (int c = 0; c < chunks; ++c) {
      const std::uint64_t b = std::min<std::uint64_t>(space.total, c * step);
      const std::uint64_t e =
          std::min<std::uint64_t>(space.total, (c + 1) * step);
      if (b < e)
        partial[static_cast<std::size_t>(c)] =
            scan_range(space, ctx, radio, geom, b, e);
    }
    // deterministic combine in chunk order
    for (const ScanBest& p : partial) {
      best.evaluated += p.evaluated;
      if (p.g2 < best.g2 || (p.g2 == best.g2 && p.index < best.index)) {
        best.g2 = p.g2;
        best.index = p.index;
      }
    }
  }

  ExhaustiveResult res;
  res.assoc = AssociationMatrix(static_cast<int>(space.options.size()),
                                radio.n_aps);
  res.candidates_enumerated = space.total;
  res.candidates_evaluated = best.evaluated;
  if (best.index == std::numeric_limits<std::uint64_t>::max())
    throw SearchSpaceError("exhaustive_p2: no feasible candidate (unexpected)");
  decode_actions(space, best.index, res.assoc);
  res.g2 = best.g2;
  return res;
}

AssociationMatrix max_snr_heuristic(double p_duty,
                                    const SlotRadioContext& radio,
                                    const Deployment& dep,
                                    const ScenarioConfig& config, Rng& rng) {
  if (p_duty < 0.0 || p_duty > 1.0)
    throw std::invalid_argument("max_snr_heuristic: p outside [0,1]");
  const int K = radio.n_ues;
  std::vector<int> requests(static_cast<std::size_t>(K), 0);
  for (int k = 0; k < K; ++k) {
    if (rng.uniform() >= p_duty) continue;
    const auto& cand = dep.candidate_sets[static_cast<std::size_t>(k)];
    int best_ap = -1;
    double best_rss = -std::numeric_limits<double>::infinity();
    for (int a : cand) {
      const double rss = radio.rss_at(k, a);
      if (rss > best_rss) {
        best_rss = rss;
        best_ap = a;
      }
    }
    if (best_ap >= 0) requests[static_cast<std::size_t>(k)] = best_ap + 1;
  }
  return arbitrate_requests(requests, radio, config).first;
}

std::pair<AssociationMatrix, std::vector<std::uint8_t>> arbitrate_requests(
    const std::vector<int>& actions, const SlotRadioContext& radio,
    const ScenarioConfig& config) {
  const int K = radio.n_ues;
  const int N = radio.n_aps;
  if (static_cast<int>(actions.size()) != K)
    throw std::invalid_argument("arbitrate_requests: bad action count");
  AssociationMatrix assoc(K, N);
  std::vector<std::uint8_t> ack(static_cast<std::size_t>(K), 0);
  for (int n = 0; n < N; ++n) {
    std::vector<int> requesters;
    for (int k = 0; k < K; ++k)
      if (actions[static_cast<std::size_t>(k)] == n + 1) requesters.push_back(k);
    std::sort(requesters.begin(), requesters.end(), [&](int a, int b) {
      const double ra = radio.rss_at(a, n), rb = radio.rss_at(b, n);
      if (ra != rb) return ra > rb;  // strongest first
      return a < b;
    });
    const int admit = std::min<int>(config.ap_capacity,
                                    static_cast<int>(requesters.size()));
    for (int i = 0; i < admit; ++i) {
      assoc.set_action(requesters[static_cast<std::size_t>(i)], n + 1);
      ack[static_cast<std::size_t>(requesters[static_cast<std::size_t>(i)])] = 1;
    }
  }
  return {assoc, ack};
}

}  // namespace edgeoff
