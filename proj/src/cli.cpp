#include "edgeoff/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "edgeoff/association.hpp"
#include "edgeoff/config.hpp"
#include "edgeoff/io.hpp"
#include "edgeoff/policy.hpp"
#include "edgeoff/sim.hpp"
#include "edgeoff/train.hpp"

namespace edgeoff {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string hash_hex(const ScenarioConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config.hash()));
  return buf;
}

void emit_error(const std::string& message, const std::string& key = "") {
  ordered_json j;
  j["error"] = message;
  if (!key.empty()) j["key"] = key;
  std::cerr << j.dump() << "\n";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_double_list(const std::string& csv,
                                      const std::string& flag) {
  std::vector<double> out;
  for (const std::string& s : split_list(csv)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(s, &pos));
      if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + s + "' in " + flag);
    }
  }
  if (out.empty()) throw ConfigError(flag + " must not be empty");
  return out;
}

std::vector<int> parse_int_list(const std::string& csv,
                                const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_double_list(csv, flag)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v || i <= 0)
      throw ConfigError(flag + " entries must be positive integers");
    out.push_back(i);
  }
  return out;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& c) {
  cmd->add_option("--config", c.config_path,
                  "scenario JSON (defaults used when omitted)");
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_option("--seed", c.seed, "base RNG seed (default: config rng_seed)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  cmd->add_option("--jobs", c.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
}

ScenarioConfig load_config(const CommonArgs& c) {
  ScenarioConfig config = c.config_path.empty()
                              ? ScenarioConfig::defaults()
                              : ScenarioConfig::from_json_file(c.config_path);
  config.validate();
  return config;
}

std::uint64_t resolve_seed(const CommonArgs& c, const ScenarioConfig& config) {
  return c.seed_set ? c.seed : config.rng_seed;
}

fs::path prepare_out(const CommonArgs& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open output file: " + path.string());
  out << j.dump(2) << "\n";
}

ordered_json metrics_json(const RunMetrics& m) {
  ordered_json j;
  j["slots"] = m.slots;
  j["n_ues"] = m.n_ues;
  j["delay_s"] = m.avg_delay_s;
  if (std::isfinite(m.tracked_delay_s))
    j["tracked_delay_s"] = m.tracked_delay_s;
  j["e_ue"] = m.e_ue;
  j["e_ap"] = m.e_ap;
  j["e_es"] = m.e_es;
  j["e_weighted"] = m.e_weighted;
  j["e_total"] = m.e_total;
  j["violation_rate"] = m.violation_rate;
  j["max_z_ratio"] = m.max_z_ratio;
  j["mean_g2"] = m.mean_g2;
  j["mean_reward"] = m.mean_reward;
  j["any_failure"] = m.any_failure;
  return j;
}

constexpr const char* metrics_header =
    "deployment,slots,delay_s,tracked_delay_s,e_ue,e_ap,e_es,e_weighted,"
    "e_total,violation_rate,max_z_ratio,mean_g2,mean_reward,any_failure";

void write_metrics_csv(const fs::path& path, const ScenarioConfig& config,
                       std::uint64_t seed,
                       const std::vector<RunMetrics>& runs) {
  std::ofstream out = open_out(path.string());
  write_preamble(out, config, seed);
  out << metrics_header << "\n";
  for (std::size_t d = 0; d < runs.size(); ++d) {
    const RunMetrics& m = runs[d];
    out << d << ',' << m.slots << ',' << csv_num(m.avg_delay_s) << ','
        << (std::isfinite(m.tracked_delay_s) ? csv_num(m.tracked_delay_s)
                                             : std::string("nan"))
        << ',' << csv_num(m.e_ue) << ',' << csv_num(m.e_ap) << ','
        << csv_num(m.e_es) << ',' << csv_num(m.e_weighted) << ','
        << csv_num(m.e_total) << ',' << csv_num(m.violation_rate) << ','
        << csv_num(m.max_z_ratio) << ',' << csv_num(m.mean_g2) << ','
        << csv_num(m.mean_reward) << ',' << (m.any_failure ? 1 : 0) << '\n';
  }
}

struct SolverChoice {
  std::string name = "exhaustive";
  double duty_cycle = 0.3;
  std::string checkpoint;
  bool stochastic = false;
};

SolverFactory make_factory(const SolverChoice& sc, const ScenarioConfig& config,
                           int jobs) {
  if (sc.name == "exhaustive") return exhaustive_factory(jobs);
  if (sc.name == "max-snr") {
    if (sc.duty_cycle <= 0.0 || sc.duty_cycle > 1.0)
      throw ConfigError("--duty-cycle must be in (0, 1]");
    return max_snr_factory(sc.duty_cycle);
  }
  if (sc.name == "learned") {
    if (sc.checkpoint.empty())
      throw ConfigError("--checkpoint is required for the learned solver");
    PolicyParameters pp = PolicyParameters::load(sc.checkpoint);
    if (pp.n_aps != config.n_aps)
      throw ConfigError("checkpoint was trained for a different AP count");
    return policy_factory(std::move(pp), sc.stochastic ? ActMode::sample
                                                       : ActMode::greedy,
                          config.marl.neighborhood_radius);
  }
  throw ConfigError("unknown solver '" + sc.name +
                    "' (expected exhaustive, max-snr, or learned)");
}

int cmd_simulate(const CommonArgs& common, const SolverChoice& sc,
                 std::int64_t slots, int deployments) {
  const ScenarioConfig config = load_config(common);
  const std::uint64_t seed = resolve_seed(common, config);
  const fs::path out = prepare_out(common);
  const SolverFactory factory = make_factory(sc, config, common.jobs);

  EngineOptions opt;
  opt.track_delay = true;
  opt.jobs = common.jobs;

  AggregateMetrics agg;
  if (deployments == 1) {
    std::ofstream fq = open_out((out / "queue_trace.csv").string());
    std::ofstream fe = open_out((out / "energy_trace.csv").string());
    std::ofstream fa = open_out((out / "assoc_trace.csv").string());
    write_preamble(fq, config, seed);
    fq << trace::queue_header << "\n";
    write_preamble(fe, config, seed);
    fe << trace::energy_header << "\n";
    write_preamble(fa, config, seed);
    fa << trace::assoc_header << "\n";
    TraceSinks sinks{&fq, &fe, &fa};
    agg.runs.push_back(run_once(config, factory, slots, seed, 0, opt, sinks));
    agg.mean = agg.runs.front();
  } else {
    agg = run_many(config, factory, slots, deployments, seed, common.jobs,
                   opt);
  }

  write_metrics_csv(out / "metrics.csv", config, seed, agg.runs);

  ordered_json j;
  j["verb"] = "simulate";
  j["config_hash"] = hash_hex(config);
  j["seed"] = seed;
  j["solver"] = sc.name;
  if (sc.name == "max-snr") j["duty_cycle"] = sc.duty_cycle;
  j["slots"] = slots;
  j["deployments"] = deployments;
  j["mean"] = metrics_json(agg.mean);
  j["stderr"] = metrics_json(agg.sem);
  ordered_json per;
  for (const RunMetrics& m : agg.runs) per.push_back(metrics_json(m));
  j["per_deployment"] = per;
  write_json_file(out / "run_summary.json", j);
  std::cout << "simulate: delay " << csv_num(agg.mean.avg_delay_s)
            << " s, weighted energy " << csv_num(agg.mean.e_weighted)
            << " J/slot over " << deployments << " deployment(s)\n";
  return 0;
}

int cmd_train(const CommonArgs& common, int episodes, double time_budget_s) {
  const ScenarioConfig config = load_config(common);
  const std::uint64_t seed = resolve_seed(common, config);
  const fs::path out = prepare_out(common);

  std::ofstream curve = open_out((out / "learning_curve.csv").string());
  write_preamble(curve, config, seed);
  curve << train_curve_header << "\n";
  std::ofstream val = open_out((out / "validation.csv").string());
  write_preamble(val, config, seed);
  val << train_validation_header << "\n";

  TrainOptions opt;
  opt.episodes = episodes;
  opt.seed = seed;
  opt.jobs = common.jobs;
  opt.time_budget_s = time_budget_s;
  opt.curve = &curve;
  opt.validation = &val;
  opt.log = &std::cout;

  const TrainResult res = train_policy(config, opt);
  res.best.save((out / "policy_best.ckpt").string());
  res.last.save((out / "policy_last.ckpt").string());

  ordered_json j;
  j["verb"] = "train";
  j["config_hash"] = hash_hex(config);
  j["seed"] = seed;
  j["episodes_run"] = res.episodes_run;
  j["ref_delay_s"] = res.ref_delay_s;
  j["best_score"] = res.best_score;
  j["diverged"] = res.diverged;
  j["aborted_updates"] = res.aborted_updates;
  j["checkpoint_best"] = "policy_best.ckpt";
  j["checkpoint_last"] = "policy_last.ckpt";
  write_json_file(out / "train_summary.json", j);
  std::cout << "train: " << res.episodes_run << " episodes, best score "
            << csv_num(res.best_score) << (res.diverged ? " (diverged)" : "")
            << "\n";
  return res.diverged ? 1 : 0;
}

int cmd_evaluate(const CommonArgs& common, const SolverChoice& sc,
                 std::int64_t slots, int deployments, int n_ues_override) {
  ScenarioConfig config = load_config(common);
  if (n_ues_override > 0) {
    config.n_ues = n_ues_override;
    config.validate();
  }
  const std::uint64_t seed = resolve_seed(common, config);
  const fs::path out = prepare_out(common);
  SolverChoice choice = sc;
  choice.name = "learned";
  const SolverFactory factory = make_factory(choice, config, common.jobs);

  EngineOptions opt;
  opt.track_delay = true;
  const AggregateMetrics agg =
      run_many(config, factory, slots, deployments, seed, common.jobs, opt);

  write_metrics_csv(out / "metrics.csv", config, seed, agg.runs);
  ordered_json j;
  j["verb"] = "evaluate";
  j["config_hash"] = hash_hex(config);
  j["seed"] = seed;
  j["solver"] = "learned";
  j["stochastic"] = choice.stochastic;
  j["n_ues"] = config.n_ues;
  j["slots"] = slots;
  j["deployments"] = deployments;
  j["mean"] = metrics_json(agg.mean);
  j["stderr"] = metrics_json(agg.sem);
  ordered_json per;
  for (const RunMetrics& m : agg.runs) per.push_back(metrics_json(m));
  j["per_deployment"] = per;
  write_json_file(out / "run_summary.json", j);
  std::cout << "evaluate: delay " << csv_num(agg.mean.avg_delay_s)
            << " s, weighted energy " << csv_num(agg.mean.e_weighted)
            << " J/slot, violation rate "
            << csv_num(agg.mean.violation_rate) << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& common, const SolverChoice& sc,
              const std::string& omega_csv, std::int64_t slots,
              int deployments) {
  const ScenarioConfig config = load_config(common);
  const std::uint64_t seed = resolve_seed(common, config);
  const fs::path out = prepare_out(common);
  const std::vector<double> omegas =
      parse_double_list(omega_csv, "--omega-list");
  for (double w : omegas)
    if (w <= 0.0) throw ConfigError("--omega-list entries must be positive");
  const SolverFactory factory = make_factory(sc, config, common.jobs);

  const std::vector<SweepRow> rows = sweep_omega(
      config, omegas, factory, slots, deployments, seed, common.jobs);

  std::ofstream csv = open_out((out / "omega_sweep.csv").string());
  write_preamble(csv, config, seed);
  csv << "omega,delay_s,e_ue,e_ap,e_es,e_weighted,e_total,violation_rate,"
         "max_z_ratio\n";
  for (const SweepRow& r : rows) {
    const RunMetrics& m = r.agg.mean;
    csv << csv_num(r.omega) << ',' << csv_num(m.avg_delay_s) << ','
        << csv_num(m.e_ue) << ',' << csv_num(m.e_ap) << ','
        << csv_num(m.e_es) << ',' << csv_num(m.e_weighted) << ','
        << csv_num(m.e_total) << ',' << csv_num(m.violation_rate) << ','
        << csv_num(m.max_z_ratio) << '\n';
  }

  ordered_json j;
  j["verb"] = "sweep-omega";
  j["config_hash"] = hash_hex(config);
  j["seed"] = seed;
  j["solver"] = sc.name;
  j["slots"] = slots;
  j["deployments"] = deployments;
  ordered_json jr;
  for (const SweepRow& r : rows) {
    ordered_json row;
    row["omega"] = r.omega;
    row["mean"] = metrics_json(r.agg.mean);
    row["stderr"] = metrics_json(r.agg.sem);
    jr.push_back(row);
  }
  j["rows"] = jr;
  write_json_file(out / "sweep_summary.json", j);
  std::cout << "sweep-omega: " << rows.size() << " points written\n";
  return 0;
}

int cmd_calibrate(const CommonArgs& common, double target_delay_s,
                  std::int64_t slots, int deployments) {
  const ScenarioConfig config = load_config(common);
  const std::uint64_t seed = resolve_seed(common, config);
  const fs::path out = prepare_out(common);
  const double target =
      target_delay_s > 0.0 ? target_delay_s : config.delay_target;

  const CalibrationResult res = calibrate_duty_cycle(
      config, target, slots, deployments, seed, common.jobs);

  std::ofstream csv = open_out((out / "calibration.csv").string());
  write_preamble(csv, config, seed);
  csv << "p,delay_s,e_weighted,meets_target\n";
  for (const CalibrationProbe& p : res.probes)
    csv << csv_num(p.p) << ',' << csv_num(p.delay_s) << ','
        << csv_num(p.e_weighted) << ',' << (p.meets_target ? 1 : 0) << '\n';

  ordered_json j;
  j["verb"] = "calibrate-duty-cycle";
  j["config_hash"] = hash_hex(config);
  j["seed"] = seed;
  j["target_delay_s"] = target;
  j["slots"] = slots;
  j["deployments"] = deployments;
  j["p_star"] = res.p_star;
  write_json_file(out / "calibration.json", j);
  std::cout << "calibrate-duty-cycle: p* = " << csv_num(res.p_star) << "\n";
  return 0;
}

int cmd_compare(const CommonArgs& common, const SolverChoice& sc,
                const std::string& solvers_csv, const std::string& k_csv,
                std::int64_t slots, int deployments) {
  const ScenarioConfig base = load_config(common);
  const fs::path out = prepare_out(common);
  const std::vector<std::string> solvers = split_list(solvers_csv);
  if (solvers.empty()) throw ConfigError("--solvers must not be empty");
  std::vector<int> ks;
  if (k_csv.empty())
    ks.push_back(base.n_ues);
  else
    ks = parse_int_list(k_csv, "--k-list");

  std::ofstream csv = open_out((out / "compare.csv").string());
  write_preamble(csv, base, resolve_seed(common, base));
  csv << "n_ues,solver,slots,deployments,delay_s,e_weighted,e_total,"
         "violation_rate,max_z_ratio,any_failure\n";

  ordered_json jr;
  for (int k : ks) {
    ScenarioConfig config = base;
    config.n_ues = k;
    config.validate();
    const std::uint64_t seed = resolve_seed(common, config);
    for (const std::string& name : solvers) {
      SolverChoice choice = sc;
      choice.name = name;
      const SolverFactory factory = make_factory(choice, config, common.jobs);
      EngineOptions opt;
      opt.track_delay = true;
      const AggregateMetrics agg =
          run_many(config, factory, slots, deployments, seed, common.jobs,
                   opt);
      const RunMetrics& m = agg.mean;
      csv << k << ',' << name << ',' << slots << ',' << deployments << ','
          << csv_num(m.avg_delay_s) << ',' << csv_num(m.e_weighted) << ','
          << csv_num(m.e_total) << ',' << csv_num(m.violation_rate) << ','
          << csv_num(m.max_z_ratio) << ',' << (m.any_failure ? 1 : 0) << '\n';
      ordered_json row;
      row["n_ues"] = k;
      row["solver"] = name;
      row["mean"] = metrics_json(m);
      row["stderr"] = metrics_json(agg.sem);
      jr.push_back(row);
      std::cout << "compare: K=" << k << " " << name << ": delay "
                << csv_num(m.avg_delay_s) << " s, weighted energy "
                << csv_num(m.e_weighted) << " J/slot\n";
    }
  }

  ordered_json j;
  j["verb"] = "compare";
  j["config_hash"] = hash_hex(base);
  j["seed"] = resolve_seed(common, base);
  j["slots"] = slots;
  j["deployments"] = deployments;
  j["rows"] = jr;
  write_json_file(out / "compare_summary.json", j);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{
      "Delay-constrained energy-minimal offloading: simulator, baselines, "
      "and policy training"};
  app.require_subcommand(1);

  CommonArgs common;
  SolverChoice sc;
  std::int64_t slots = 10000;
  int deployments = 1;
  int episodes = 0;
  int n_ues_override = 0;
  double time_budget_s = 0.0;
  double target_delay_s = 0.0;
  std::string omega_csv;
  std::string solvers_csv = "learned,max-snr";
  std::string k_csv;

  CLI::App* sim = app.add_subcommand("simulate", "run one solver");
  add_common(sim, common);
  sim->add_option("--solver", sc.name, "exhaustive | max-snr | learned");
  sim->add_option("--duty-cycle", sc.duty_cycle, "max-snr activity prob");
  sim->add_option("--checkpoint", sc.checkpoint, "policy checkpoint path");
  sim->add_flag("--stochastic", sc.stochastic, "sample instead of argmax");
  sim->add_option("--slots", slots)->check(CLI::PositiveNumber);
  sim->add_option("--deployments", deployments)->check(CLI::PositiveNumber);

  CLI::App* train = app.add_subcommand("train", "PPO-train the policy");
  add_common(train, common);
  train->add_option("--episodes", episodes)->check(CLI::NonNegativeNumber);
  train->add_option("--time-budget", time_budget_s,
                    "wall-clock limit in seconds (0 = unlimited)");

  CLI::App* eval = app.add_subcommand("evaluate", "run a trained checkpoint");
  add_common(eval, common);
  eval->add_option("--checkpoint", sc.checkpoint)->required();
  eval->add_flag("--stochastic", sc.stochastic, "sample instead of argmax");
  eval->add_option("--slots", slots)->check(CLI::PositiveNumber);
  eval->add_option("--deployments", deployments)->check(CLI::PositiveNumber);
  eval->add_option("--n-ues", n_ues_override,
                   "override the UE count (policy transfers across K)");

  CLI::App* sweep =
      app.add_subcommand("sweep-omega", "trade-off curve over the weight");
  add_common(sweep, common);
  sweep->add_option("--omega-list", omega_csv, "comma-separated weights")
      ->required();
  sweep->add_option("--solver", sc.name, "exhaustive | max-snr | learned");
  sweep->add_option("--duty-cycle", sc.duty_cycle);
  sweep->add_option("--checkpoint", sc.checkpoint);
  sweep->add_option("--slots", slots)->check(CLI::PositiveNumber);
  sweep->add_option("--deployments", deployments)->check(CLI::PositiveNumber);

  CLI::App* cal = app.add_subcommand("calibrate-duty-cycle",
                                     "smallest duty cycle meeting the delay "
                                     "target");
  add_common(cal, common);
  cal->add_option("--target-delay", target_delay_s,
                  "seconds (default: config delay_target)");
  cal->add_option("--slots", slots)->check(CLI::PositiveNumber);
  cal->add_option("--deployments", deployments)->check(CLI::PositiveNumber);

  CLI::App* cmp = app.add_subcommand("compare", "solvers side by side");
  add_common(cmp, common);
  cmp->add_option("--solvers", solvers_csv, "comma-separated solver names");
  cmp->add_option("--k-list", k_csv, "comma-separated UE counts");
  cmp->add_option("--duty-cycle", sc.duty_cycle);
  cmp->add_option("--checkpoint", sc.checkpoint);
  cmp->add_option("--slots", slots)->check(CLI::PositiveNumber);
  cmp->add_option("--deployments", deployments)->check(CLI::PositiveNumber);

  // calibration has its own defaults; remember whether the user overrode
  bool slots_defaulted = true;
  bool deployments_defaulted = true;
  for (CLI::App* c : {sim, eval, sweep, cal, cmp}) {
    c->get_option("--slots")->each(
        [&slots_defaulted](const std::string&) { slots_defaulted = false; });
    c->get_option("--deployments")
        ->each([&deployments_defaulted](const std::string&) {
          deployments_defaulted = false;
        });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common, sc, slots, deployments);
    if (train->parsed()) return cmd_train(common, episodes, time_budget_s);
    if (eval->parsed())
      return cmd_evaluate(common, sc, slots, deployments, n_ues_override);
    if (sweep->parsed())
      return cmd_sweep(common, sc, omega_csv, slots, deployments);
    if (cal->parsed()) {
      if (slots_defaulted) slots = 5000;
      if (deployments_defaulted) deployments = 4;
      return cmd_calibrate(common, target_delay_s, slots, deployments);
    }
    if (cmp->parsed())
      return cmd_compare(common, sc, solvers_csv, k_csv, slots, deployments);
    emit_error("no subcommand given");
    return 2;
  } catch (const ConfigError& e) {
    emit_error(e.what(), e.key());
    return 2;
  } catch (const CalibrationError& e) {
    emit_error(e.what());
    return 3;
  } catch (const SearchSpaceError& e) {
    emit_error(e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error(e.what());
    return 1;
  }
}

}  // namespace edgeoff
