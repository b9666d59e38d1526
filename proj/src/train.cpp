#include "edgeoff/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "edgeoff/io.hpp"

namespace edgeoff {

namespace {

struct ValOutcome {
  double delay_s = 0.0;
  double e_weighted = 0.0;
  double violation_rate = 0.0;
};

ValOutcome validate(const ScenarioConfig& config, const PolicyParameters& pp,
                    std::uint64_t val_seed, int jobs) {
  const AggregateMetrics agg = run_many(
      config, policy_factory(pp, ActMode::greedy),
      config.marl.eval_slots, config.marl.eval_deployments, val_seed, jobs);
  return {agg.mean.avg_delay_s, agg.mean.e_weighted,
          agg.mean.violation_rate};
}

// feasibility-first: match the reference delay, then minimize energy
double score_of(const ValOutcome& v, double ref_delay_s) {
  if (v.delay_s <= ref_delay_s) return v.e_weighted;
  return 1e3 + (v.delay_s - ref_delay_s);
}

}  // namespace

TrainResult train_policy(const ScenarioConfig& config,
                         const TrainOptions& opt) {
  const MarlConfig& marl = config.marl;
  const int episodes = opt.episodes > 0 ? opt.episodes : marl.train_episodes;
  const std::uint64_t val_seed = derive_seed(opt.seed, seed_stream::validation);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_s = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  Rng init_rng(derive_seed(opt.seed, seed_stream::policy_init));
  TrainResult res;
  res.last = PolicyParameters::create(
      marl.hidden_m, config.n_aps, NormConstants::from_config(config),
      init_rng);
  PolicyParameters& pp = res.last;
  AdamState adam(pp.params.size());
  Rng shuffle_rng(derive_seed(opt.seed, seed_stream::ppo_shuffle));

  // exhaustive reference on the validation deployments (computed once)
  try {
    const AggregateMetrics ref =
        run_many(config, exhaustive_factory(opt.jobs), marl.eval_slots,
                 marl.eval_deployments, val_seed, opt.jobs);
    res.ref_delay_s = ref.mean.avg_delay_s;
  } catch (const SearchSpaceError&) {
    res.ref_delay_s = config.delay_target;  // too large to scan; use target
  }
  if (opt.log)
    *opt.log << "validation reference delay: " << csv_num(res.ref_delay_s)
             << " s\n";

  res.best = pp;
  res.best_score = std::numeric_limits<double>::infinity();

  std::vector<Sample> buffer;
  buffer.reserve(static_cast<std::size_t>(marl.batch_size) * 2);
  PpoStats last_stats;
  int consecutive_failures = 0;

  auto run_validation = [&](int episode) {
    const ValOutcome v = validate(config, pp, val_seed, opt.jobs);
    ValidationRow row;
    row.episode = episode;
    row.delay_s = v.delay_s;
    row.e_weighted = v.e_weighted;
    row.violation_rate = v.violation_rate;
    row.score = score_of(v, res.ref_delay_s);
    if (row.score < res.best_score) {
      res.best_score = row.score;
      res.best = pp;
      row.best_so_far = true;
    }
    res.validations.push_back(row);
    if (opt.validation)
      *opt.validation << row.episode << ',' << csv_num(row.delay_s) << ','
                      << csv_num(row.e_weighted) << ','
                      << csv_num(row.violation_rate) << ','
                      << csv_num(res.ref_delay_s) << ','
                      << csv_num(row.score) << ','
                      << (row.best_so_far ? 1 : 0) << '\n';
    if (opt.log)
      *opt.log << "episode " << episode << ": validation delay "
               << csv_num(v.delay_s) << " s, weighted energy "
               << csv_num(v.e_weighted) << " J/slot"
               << (row.best_so_far ? " (best)" : "") << "\n";
  };

  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t ep_seed =
        derive_seed(opt.seed, seed_stream::train_episode,
                    static_cast<std::uint64_t>(e));
    const std::uint64_t dep_seed =
        derive_seed(ep_seed, seed_stream::deployment);
    Deployment dep = generate_deployment(config, dep_seed);
    EngineOptions eng_opt;
    eng_opt.random_cpu = true;
    SimEngine engine(config, std::move(dep), dep_seed, eng_opt);
    PolicySolver solver(pp, derive_seed(dep_seed, seed_stream::solver),
                        ActMode::sample, marl.neighborhood_radius);
    solver.attach_collector(&buffer);

    EpisodeRow row;
    row.episode = e;
    double reward_sum = 0.0;
    for (int t = 0; t < marl.episode_slots; ++t) {
      const std::size_t before = buffer.size();
      const StepInfo info = engine.step(solver);
      for (std::size_t i = before; i < buffer.size(); ++i)
        buffer[i].reward = info.reward;
      reward_sum += info.reward;
      ++row.slots;
      if (info.failed) {
        row.failed = true;
        break;
      }
    }
    row.mean_reward = row.slots > 0 ? reward_sum / row.slots : 0.0;
    const RunMetrics em = engine.metrics();
    row.mean_delay_s = em.avg_delay_s;
    row.mean_energy = em.e_weighted;

    consecutive_failures = row.failed ? consecutive_failures + 1 : 0;
    {
      int window = 0, fails = 0;
      for (std::size_t i = res.curve.size(); i-- > 0 && window < 19; ++window)
        fails += res.curve[i].failed ? 1 : 0;
      fails += row.failed ? 1 : 0;
      row.failure_rate = static_cast<double>(fails) / (window + 1);
    }

    if (static_cast<int>(buffer.size()) >= marl.batch_size) {
      last_stats = ppo_update(pp, adam, buffer, marl, shuffle_rng);
      buffer.clear();
      row.updated = true;
      if (last_stats.aborted) {
        ++res.aborted_updates;
        if (opt.log)
          *opt.log << "episode " << e
                   << ": non-finite update aborted, parameters kept\n";
      }
    }
    row.policy_loss = last_stats.policy_loss;
    row.value_loss = last_stats.value_loss;
    row.entropy = last_stats.entropy;
    row.clip_fraction = last_stats.clip_fraction;
    row.approx_kl = last_stats.approx_kl;
    res.curve.push_back(row);
    if (opt.curve)
      *opt.curve << row.episode << ',' << row.slots << ','
                 << csv_num(row.mean_reward) << ',' << (row.failed ? 1 : 0)
                 << ',' << csv_num(row.failure_rate) << ','
                 << csv_num(row.mean_delay_s) << ','
                 << csv_num(row.mean_energy) << ','
                 << csv_num(row.policy_loss) << ','
                 << csv_num(row.value_loss) << ',' << csv_num(row.entropy)
                 << ',' << csv_num(row.clip_fraction) << ','
                 << csv_num(row.approx_kl) << ',' << (row.updated ? 1 : 0)
                 << '\n';
    res.episodes_run = e + 1;

    if ((e + 1) % marl.eval_interval == 0) run_validation(e + 1);

    if (consecutive_failures >= 50) {
      res.diverged = true;
      if (opt.log)
        *opt.log << "training diverged: 50 consecutive failure-terminated "
                    "episodes\n";
      break;
    }
    if (opt.time_budget_s > 0.0 && elapsed_s() > opt.time_budget_s) {
      if (opt.log)
        *opt.log << "time budget reached after " << res.episodes_run
                 << " episodes\n";
      break;
    }
  }

  // final validation unless the last episode already triggered one
  if (res.validations.empty() ||
      res.validations.back().episode != res.episodes_run)
    run_validation(res.episodes_run);

  if (!std::isfinite(res.best_score)) res.best = pp;
  return res;
}

}  // namespace edgeoff
