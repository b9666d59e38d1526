#include "edgeoff/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <utility>

#include "edgeoff/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace edgeoff {

P2Decision ExhaustiveSolver::decide(const SlotView& view) {
  const ExhaustiveResult res =
      exhaustive_p2(SlotContext::of(view.queues, view.config), view.radio,
                    view.geom, view.dep, jobs_);
  last_g2_ = res.g2;
  P2Decision dec;
  dec.assoc = res.assoc;
  dec.ack.resize(static_cast<std::size_t>(view.queues.n_ues()));
  for (int k = 0; k < view.queues.n_ues(); ++k)
    dec.ack[static_cast<std::size_t>(k)] = dec.assoc.active(k) ? 1 : 0;
  return dec;
}

P2Decision MaxSnrSolver::decide(const SlotView& view) {
  P2Decision dec;
  dec.assoc =
      max_snr_heuristic(p_duty_, view.radio, view.dep, view.config, rng_);
  dec.ack.resize(static_cast<std::size_t>(view.queues.n_ues()));
  for (int k = 0; k < view.queues.n_ues(); ++k)
    dec.ack[static_cast<std::size_t>(k)] = dec.assoc.active(k) ? 1 : 0;
  return dec;
}

PolicySolver::PolicySolver(PolicyParameters pp, std::uint64_t seed,
                           ActMode mode, double neighborhood_radius)
    : pp_(std::move(pp)),
      mode_(mode),
      radius_(neighborhood_radius),
      rng_(seed) {}

P2Decision PolicySolver::decide(const SlotView& view) {
  const int n_ues = view.queues.n_ues();
  const int n_aps = pp_.n_aps;
  if (view.config.n_aps != n_aps)
    throw std::invalid_argument(
        "PolicySolver: checkpoint was built for a different AP count");
  const int rd = pp_.radio_dim();
  const int ad = pp_.action_dim();
  constexpr int md = PolicyParameters::mec_dim;

  if (!mem_ready_ || static_cast<int>(mem_.prev_action.size()) != n_ues) {
    mem_.reset(n_ues);
    mem_ready_ = true;
  }

  radio_obs_.resize(static_cast<std::size_t>(n_ues) * rd);
  mec_obs_.resize(static_cast<std::size_t>(n_ues) * md);
  masks_.resize(static_cast<std::size_t>(n_ues) * ad);
  requested_.assign(static_cast<std::size_t>(n_ues), 0);

  for (int k = 0; k < n_ues; ++k) {
    build_radio_observation(k, mem_, view.radio, view.dep, pp_.norms,
                            radio_obs_.data() + static_cast<std::size_t>(k) * rd,
                            n_aps);
    build_mec_observation(k, view.queues, mem_, view.dep, pp_.norms,
                          mec_obs_.data() + static_cast<std::size_t>(k) * md);
    build_action_mask(k, view.dep, n_aps,
                      masks_.data() + static_cast<std::size_t>(k) * ad);
  }

  for (int k = 0; k < n_ues; ++k) {
    const double* mec_all = mec_obs_.data();
    int agent_count = n_ues;
    int receiver_idx = k;
    if (radius_ > 0.0) {
      const std::vector<int> nbr = neighborhood_of(k, view.dep, radius_);
      agent_count = static_cast<int>(nbr.size());
      mec_gather_.resize(static_cast<std::size_t>(agent_count) * md);
      for (int i = 0; i < agent_count; ++i) {
        if (nbr[static_cast<std::size_t>(i)] == k) receiver_idx = i;
        const double* src =
            mec_obs_.data() +
            static_cast<std::size_t>(nbr[static_cast<std::size_t>(i)]) * md;
        double* dst = mec_gather_.data() + static_cast<std::size_t>(i) * md;
        for (int j = 0; j < md; ++j) dst[j] = src[j];
      }
      mec_all = mec_gather_.data();
    }

    const double* robs =
        radio_obs_.data() + static_cast<std::size_t>(k) * rd;
    const std::uint8_t* mask =
        masks_.data() + static_cast<std::size_t>(k) * ad;
    policy_forward(pp_, robs, mec_all, agent_count, receiver_idx, mask, ws_);
    const int action = act_from(ws_, mode_, rng_);
    requested_[static_cast<std::size_t>(k)] = action;

    if (collector_) {
      Sample s;
      s.radio_obs.assign(robs, robs + rd);
      s.mec_all.assign(mec_all,
                       mec_all + static_cast<std::size_t>(agent_count) * md);
      s.mask.assign(mask, mask + ad);
      s.agent_count = agent_count;
      s.receiver_idx = receiver_idx;
      s.action = action;
      s.logp_old = ws_.logp[static_cast<std::size_t>(action)];
      s.value_old = ws_.value;
      collector_->push_back(std::move(s));
    }
  }

  auto [assoc, ack] = arbitrate_requests(requested_, view.radio, view.config);
  P2Decision dec;
  dec.assoc = std::move(assoc);
  dec.ack = std::move(ack);
  return dec;
}

void PolicySolver::observe(const P2Decision& dec,
                           const std::vector<LinkBudget>& links,
                           const std::vector<double>& cpu_shares) {
  const int n_ues = dec.assoc.n_ues();
  if (!mem_ready_ || static_cast<int>(mem_.prev_action.size()) != n_ues) {
    mem_.reset(n_ues);
    mem_ready_ = true;
  }
  double sum_rate = 0.0;
  for (int k = 0; k < n_ues; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    mem_.prev_action[ks] = dec.assoc.action(k);
    mem_.prev_rate[ks] = links[ks].rate;
    sum_rate += links[ks].rate;
    mem_.prev_ack[ks] = dec.ack.empty() ? 0 : dec.ack[ks];
    mem_.prev_share[ks] = cpu_shares.empty() ? 0.0 : cpu_shares[ks];
  }
  mem_.prev_sum_rate = sum_rate;
}

SimEngine::SimEngine(const ScenarioConfig& config, Deployment dep,
                     std::uint64_t seed, EngineOptions opt)
    : config_(config),
      dep_(std::move(dep)),
      geom_(RadioGeometry::build(dep_, config_)),
      opt_(opt),
      rng_channels_(derive_seed(seed, seed_stream::channels)),
      rng_arrivals_(derive_seed(seed, seed_stream::arrivals)),
      rng_cpu_(derive_seed(seed, seed_stream::cpu_random)),
      arrivals_(config_.n_ues, config_.arrival_mean, config_.slot_duration),
      queues_(config_.n_ues),
      tracker_(config_.n_ues),
      sum_q_total_(static_cast<std::size_t>(config_.n_ues), 0.0) {
  if (static_cast<int>(dep_.ue_positions.size()) != config_.n_ues ||
      static_cast<int>(dep_.ap_positions.size()) != config_.n_aps)
    throw std::invalid_argument("SimEngine: deployment does not match config");
}

StepInfo SimEngine::step(P2Solver& solver) {
  const int n_ues = config_.n_ues;
  StepInfo info;
  info.t = t_;

  const ChannelSnapshot snap = draw_channels(dep_, config_, rng_channels_);
  const SlotRadioContext radio = SlotRadioContext::build(geom_, snap, config_);
  info.arrivals = arrivals_.sample(rng_arrivals_);

  const SlotView view{t_, queues_, radio, geom_, dep_, config_};

  ScheduleResult sched;
  auto schedule_cpu = [&] {
    if (opt_.random_cpu) {
      const std::vector<double>& freq = config_.cpu_freq_set;
      sched.f_c = freq[rng_cpu_.below(freq.size())];
      sched.f_k.assign(static_cast<std::size_t>(n_ues), 0.0);
      if (sched.f_c > 0.0) {
        // Dirichlet(1,...,1) shares via normalized Exp(1) draws
        double sum = 0.0;
        for (int k = 0; k < n_ues; ++k) {
          const double g = -std::log(1.0 - rng_cpu_.uniform());
          sched.f_k[static_cast<std::size_t>(k)] = g;
          sum += g;
        }
        if (sum <= 0.0) sum = 1.0;
        for (double& f : sched.f_k) f = sched.f_c * f / sum;
      }
    } else {
      sched = solve_p1(queues_, config_, config_.lyapunov_weight,
                       config_.energy_weights[2]);
    }
  };

  P2Decision dec;
  if (opt_.p1_before_p2) {
    schedule_cpu();
    dec = solver.decide(view);
  } else {
    dec = solver.decide(view);
    schedule_cpu();
  }

  info.links = compute_sinr_and_rate_fast(dec.assoc, radio, geom_, config_);
  info.uplink_units.resize(static_cast<std::size_t>(n_ues));
  info.computed_units.resize(static_cast<std::size_t>(n_ues));
  std::vector<std::uint8_t> ue_active(static_cast<std::size_t>(n_ues), 0);
  std::vector<std::uint8_t> ap_active(static_cast<std::size_t>(config_.n_aps),
                                      0);
  std::vector<double> tx_power(static_cast<std::size_t>(n_ues), 0.0);
  for (int k = 0; k < n_ues; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    info.uplink_units[ks] = uplink_units(info.links[ks].rate, config_);
    info.computed_units[ks] = computed_units(sched.f_k[ks], config_);
    ue_active[ks] = dec.assoc.active(k) ? 1 : 0;
    tx_power[ks] = info.links[ks].tx_power;
    if (dec.assoc.active(k))
      ap_active[static_cast<std::size_t>(dec.assoc.serving_ap(k))] = 1;
  }
  info.energy =
      slot_energy(ue_active, tx_power, ap_active, sched.f_c, config_);
  info.g2 = eval_G2_terms(SlotContext::of(queues_, config_), info.uplink_units,
                          info.energy.e_ue, info.energy.e_ap);

  for (int k = 0; k < n_ues; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    if (opt_.track_delay)
      tracker_.on_slot(k, t_, info.arrivals[ks], info.uplink_units[ks],
                       info.computed_units[ks]);
    const std::int64_t q_local = queues_.q_local[ks];
    const std::int64_t q_server = queues_.q_server[ks];
    queues_.q_local[ks] =
        step_local_queue(q_local, info.uplink_units[ks], info.arrivals[ks]);
    queues_.q_server[ks] = step_server_queue(q_server, info.computed_units[ks],
                                             q_local, info.uplink_units[ks]);
  }
  for (int k = 0; k < n_ues; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    const double q_avg = config_.delay_target * arrivals_.rate_estimate(k);
    queues_.set_targets(k, q_avg, config_.epsilon1, config_.epsilon2);
    queues_.z[ks] = step_virtual_queue(
        queues_.z[ks], static_cast<double>(queues_.q_total(k)), q_avg);
  }
  info.failed = check_failure(queues_) == QueueStatus::failed;
  info.reward = reward_from_g2(info.g2, info.failed, config_);
  info.f_c = sched.f_c;
  info.assoc = dec.assoc;
  info.cpu_shares = sched.f_k;

  sum_e_ue_ += info.energy.e_ue;
  sum_e_ap_ += info.energy.e_ap;
  sum_e_es_ += info.energy.e_es;
  sum_e_w_ += info.energy.e_weighted;
  sum_e_tot_ += info.energy.e_total;
  sum_reward_ += info.reward;
  sum_g2_ += info.g2;
  if (info.failed) ++violations_;
  for (int k = 0; k < n_ues; ++k)
    sum_q_total_[static_cast<std::size_t>(k)] +=
        static_cast<double>(queues_.q_total(k));

  if (traces.queues) {
    std::ostream& os = *traces.queues;
    for (int k = 0; k < n_ues; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      os << t_ << ',' << k << ',' << info.arrivals[ks] << ','
         << info.uplink_units[ks] << ',' << info.computed_units[ks] << ','
         << queues_.q_local[ks] << ',' << queues_.q_server[ks] << ','
         << csv_num(queues_.z[ks]) << ',' << csv_num(queues_.q_avg[ks]) << ','
         << (info.failed ? 1 : 0) << '\n';
    }
  }
  if (traces.energy) {
    std::ostream& os = *traces.energy;
    os << t_ << ',' << csv_num(info.energy.e_ue) << ','
       << csv_num(info.energy.e_ap) << ',' << csv_num(info.energy.e_es) << ','
       << csv_num(info.energy.e_weighted) << ','
       << csv_num(info.energy.e_total) << ',' << csv_num(info.f_c) << ','
       << csv_num(info.g2) << ',' << csv_num(info.reward) << '\n';
  }
  if (traces.assoc) {
    std::ostream& os = *traces.assoc;
    for (int k = 0; k < n_ues; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      os << t_ << ',' << k << ',' << dec.assoc.action(k) << ','
         << (dec.ack.empty() ? 0 : static_cast<int>(dec.ack[ks])) << ','
         << csv_num(info.links[ks].tx_power) << ','
         << csv_num(info.links[ks].sinr) << ','
         << csv_num(info.links[ks].rate) << '\n';
    }
  }

  solver.observe(dec, info.links, sched.f_k);
  ++t_;
  return info;
}

RunMetrics SimEngine::metrics() const {
  RunMetrics m;
  m.slots = t_;
  m.n_ues = config_.n_ues;
  if (t_ == 0) return m;
  const double inv = 1.0 / static_cast<double>(t_);
  m.e_ue = sum_e_ue_ * inv;
  m.e_ap = sum_e_ap_ * inv;
  m.e_es = sum_e_es_ * inv;
  m.e_weighted = sum_e_w_ * inv;
  m.e_total = sum_e_tot_ * inv;
  m.mean_reward = sum_reward_ * inv;
  m.mean_g2 = sum_g2_ * inv;
  m.violation_rate = static_cast<double>(violations_) * inv;
  m.any_failure = violations_ > 0;

  double delay_sum = 0.0;
  int delay_count = 0;
  double max_ratio = 0.0;
  for (int k = 0; k < config_.n_ues; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    const double rate = arrivals_.rate_estimate(k);  // units/s
    if (rate > 0.0) {
      delay_sum += (sum_q_total_[ks] * inv) / rate;
      ++delay_count;
    }
    if (queues_.q_avg[ks] > 0.0) {
      const double ratio = (queues_.z[ks] * inv) / queues_.q_avg[ks];
      if (ratio > max_ratio) max_ratio = ratio;
    }
  }
  m.avg_delay_s = delay_count > 0 ? delay_sum / delay_count : 0.0;
  m.max_z_ratio = max_ratio;
  if (opt_.track_delay)
    m.tracked_delay_s = tracker_.mean_delay_slots() * config_.slot_duration;
  return m;
}

SolverFactory exhaustive_factory(int jobs) {
  return [jobs](const ScenarioConfig&, const Deployment&,
                const RadioGeometry&, std::uint64_t) {
    return std::make_unique<ExhaustiveSolver>(jobs);
  };
}

SolverFactory max_snr_factory(double p_duty) {
  return [p_duty](const ScenarioConfig&, const Deployment&,
                  const RadioGeometry&, std::uint64_t seed) {
    return std::make_unique<MaxSnrSolver>(p_duty, seed);
  };
}

SolverFactory policy_factory(PolicyParameters pp, ActMode mode,
                             double neighborhood_radius) {
  return [pp = std::move(pp), mode, neighborhood_radius](
             const ScenarioConfig&, const Deployment&, const RadioGeometry&,
             std::uint64_t seed) {
    return std::make_unique<PolicySolver>(pp, seed, mode,
                                          neighborhood_radius);
  };
}

RunMetrics run_once(const ScenarioConfig& config, const SolverFactory& make,
                    std::int64_t slots, std::uint64_t seed, int dep_index,
                    EngineOptions opt, TraceSinks traces) {
  const std::uint64_t dep_seed =
      derive_seed(seed, seed_stream::deployment, static_cast<std::uint64_t>(
                                                     dep_index));
  Deployment dep = generate_deployment(config, dep_seed);
  SimEngine engine(config, std::move(dep), dep_seed, opt);
  engine.traces = traces;
  std::unique_ptr<P2Solver> solver =
      make(config, engine.deployment(), engine.geometry(),
           derive_seed(dep_seed, seed_stream::solver));
  for (std::int64_t t = 0; t < slots; ++t) engine.step(*solver);
  return engine.metrics();
}

AggregateMetrics run_many(const ScenarioConfig& config,
                          const SolverFactory& make, std::int64_t slots,
                          int deployments, std::uint64_t seed, int jobs,
                          EngineOptions opt) {
  if (deployments <= 0)
    throw std::invalid_argument("run_many: deployments must be > 0");
  AggregateMetrics agg;
  agg.runs.resize(static_cast<std::size_t>(deployments));

  std::exception_ptr first_error;
  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (int d = 0; d < deployments; ++d) {
      try {
        agg.runs[static_cast<std::size_t>(d)] =
            run_once(config, make, slots, seed, d, opt);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!first_error) first_error = std::current_exception();
      }
    }
  } else {
    for (int d = 0; d < deployments; ++d)
      agg.runs[static_cast<std::size_t>(d)] =
          run_once(config, make, slots, seed, d, opt);
  }
  if (first_error) std::rethrow_exception(first_error);

  RunMetrics& m = agg.mean;
  m.slots = slots;
  m.n_ues = config.n_ues;
  const double inv = 1.0 / deployments;
  double tracked = 0.0;
  for (const RunMetrics& r : agg.runs) {
    m.e_ue += r.e_ue * inv;
    m.e_ap += r.e_ap * inv;
    m.e_es += r.e_es * inv;
    m.e_weighted += r.e_weighted * inv;
    m.e_total += r.e_total * inv;
    m.avg_delay_s += r.avg_delay_s * inv;
    m.violation_rate += r.violation_rate * inv;
    m.mean_reward += r.mean_reward * inv;
    m.mean_g2 += r.mean_g2 * inv;
    m.max_z_ratio = std::max(m.max_z_ratio, r.max_z_ratio);
    m.any_failure = m.any_failure || r.any_failure;
    if (opt.track_delay) tracked += r.tracked_delay_s * inv;
  }
  if (opt.track_delay) m.tracked_delay_s = tracked;

  if (deployments > 1) {
    RunMetrics& s = agg.sem;
    const double denom = 1.0 / (deployments * (deployments - 1.0));
    auto accum = [denom](double& out, double run_value, double mean_value) {
      const double d = run_value - mean_value;
      out += d * d * denom;
    };
    double tracked_var = 0.0;
    for (const RunMetrics& r : agg.runs) {
      accum(s.e_ue, r.e_ue, m.e_ue);
      accum(s.e_ap, r.e_ap, m.e_ap);
      accum(s.e_es, r.e_es, m.e_es);
      accum(s.e_weighted, r.e_weighted, m.e_weighted);
      accum(s.e_total, r.e_total, m.e_total);
      accum(s.avg_delay_s, r.avg_delay_s, m.avg_delay_s);
      accum(s.violation_rate, r.violation_rate, m.violation_rate);
      accum(s.mean_reward, r.mean_reward, m.mean_reward);
      accum(s.mean_g2, r.mean_g2, m.mean_g2);
      if (opt.track_delay) accum(tracked_var, r.tracked_delay_s, tracked);
    }
    s.e_ue = std::sqrt(s.e_ue);
    s.e_ap = std::sqrt(s.e_ap);
    s.e_es = std::sqrt(s.e_es);
    s.e_weighted = std::sqrt(s.e_weighted);
    s.e_total = std::sqrt(s.e_total);
    s.avg_delay_s = std::sqrt(s.avg_delay_s);
    s.violation_rate = std::sqrt(s.violation_rate);
    s.mean_reward = std::sqrt(s.mean_reward);
    s.mean_g2 = std::sqrt(s.mean_g2);
    if (opt.track_delay) s.tracked_delay_s = std::sqrt(tracked_var);
  }
  agg.sem.slots = slots;
  agg.sem.n_ues = config.n_ues;
  if (opt.track_delay && deployments == 1) agg.sem.tracked_delay_s = 0.0;
  if (!opt.track_delay) agg.sem.tracked_delay_s = m.tracked_delay_s;
  return agg;
}

std::vector<SweepRow> sweep_omega(const ScenarioConfig& config,
                                  std::vector<double> omegas,
                                  const SolverFactory& make,
                                  std::int64_t slots, int deployments,
                                  std::uint64_t seed, int jobs) {
  std::sort(omegas.begin(), omegas.end());
  std::vector<SweepRow> rows;
  rows.reserve(omegas.size());
  for (double omega : omegas) {
    ScenarioConfig cfg = config;
    cfg.lyapunov_weight = omega;
    SweepRow row;
    row.omega = omega;
    row.agg = run_many(cfg, make, slots, deployments, seed, jobs);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace edgeoff
