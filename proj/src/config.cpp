#include "edgeoff/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace edgeoff {

using nlohmann::ordered_json;

namespace {

void require(bool cond, const std::string& what, const std::string& key = "") {
  if (!cond) throw ConfigError(what, key);
}

const std::set<std::string>& core_keys() {
  static const std::set<std::string> keys = {
      "n_ues", "n_aps", "slot_duration", "signaling_fraction", "bandwidth",
      "noise_psd", "bits_per_unit", "units_per_cycle", "cpu_freq_set",
      "switched_capacitance", "ue_power_on", "ue_power_off", "ap_power_on",
      "ap_power_off", "es_power_on", "es_power_off", "max_tx_power",
      "target_snr_db", "ap_capacity", "arrival_mean", "delay_target",
      "lyapunov_weight", "energy_weights", "cell_radius",
      "inter_cell_distance", "pathloss_exponent", "shadowing_variance_db",
      "backlobe_gain_db", "rng_seed"};
  return keys;
}

const std::set<std::string>& extended_keys() {
  static const std::set<std::string> keys = {
      "epsilon1", "epsilon2", "consistent_tau", "reward_scale", "fail_reward",
      "ue_max_gain_db", "ap_max_gain_db", "ue_beamwidth_deg",
      "ap_beamwidth_deg", "candidate_radius_factor", "exhaustive_guard_bits",
      "rss_offset_dbm", "rss_scale_db", "marl"};
  return keys;
}

const std::set<std::string>& marl_keys() {
  static const std::set<std::string> keys = {
      "hidden_m", "learning_rate", "ppo_clip", "entropy_coef", "value_coef",
      "ppo_epochs", "batch_size", "minibatch_size", "episode_slots",
      "train_episodes", "eval_interval", "eval_deployments", "eval_slots",
      "neighborhood_radius"};
  return keys;
}

template <typename T>
T get_as(const ordered_json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what(), key);
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_ues >= 1, "n_ues must be >= 1", "n_ues");
  require(n_aps >= 1, "n_aps must be >= 1", "n_aps");
  require(slot_duration > 0.0, "slot_duration must be positive",
          "slot_duration");
  require(signaling_fraction > 0.0 && signaling_fraction < 1.0,
          "signaling_fraction must lie in (0,1)", "signaling_fraction");
  require(bandwidth > 0.0, "bandwidth must be positive", "bandwidth");
  require(noise_psd > 0.0, "noise_psd must be positive", "noise_psd");
  require(bits_per_unit > 0.0, "bits_per_unit must be positive",
          "bits_per_unit");
  require(units_per_cycle > 0.0, "units_per_cycle must be positive",
          "units_per_cycle");
  require(!cpu_freq_set.empty() && cpu_freq_set.front() == 0.0,
          "cpu_freq_set must contain 0 as its first element", "cpu_freq_set");
  for (std::size_t i = 0; i + 1 < cpu_freq_set.size(); ++i)
    require(cpu_freq_set[i] < cpu_freq_set[i + 1],
            "cpu_freq_set must be strictly ascending", "cpu_freq_set");
  require(cpu_freq_set.back() >= 0.0, "cpu_freq_set must be nonnegative",
          "cpu_freq_set");
  require(switched_capacitance >= 0.0,
          "switched_capacitance must be nonnegative", "switched_capacitance");
  for (double p : {ue_power_on, ue_power_off, ap_power_on, ap_power_off,
                   es_power_on, es_power_off})
    require(p > 0.0, "entity powers must be strictly positive");
  require(max_tx_power > 0.0, "max_tx_power must be positive", "max_tx_power");
  require(ap_capacity >= 1, "ap_capacity must be >= 1", "ap_capacity");
  require(arrival_mean >= 0.0, "arrival_mean must be nonnegative",
          "arrival_mean");
  require(delay_target > 0.0, "delay_target must be positive", "delay_target");
  require(lyapunov_weight >= 0.0, "lyapunov_weight must be nonnegative",
          "lyapunov_weight");
  double alpha_sum = 0.0;
  for (double a : energy_weights) {
    require(a >= 0.0, "energy_weights must be nonnegative", "energy_weights");
    alpha_sum += a;
  }
  require(std::abs(alpha_sum - 1.0) <= 1e-12,
          "energy_weights must sum to 1 within 1e-12", "energy_weights");
  require(cell_radius > 0.0, "cell_radius must be positive", "cell_radius");
  require(inter_cell_distance > 0.0, "inter_cell_distance must be positive",
          "inter_cell_distance");
  require(pathloss_exponent > 0.0, "pathloss_exponent must be positive",
          "pathloss_exponent");
  require(shadowing_variance_db >= 0.0,
          "shadowing_variance_db must be nonnegative", "shadowing_variance_db");
  require(epsilon1 >= 0.0, "epsilon1 must be nonnegative", "epsilon1");
  require(epsilon2 >= 0.0, "epsilon2 must be nonnegative", "epsilon2");
  require(reward_scale > 0.0, "reward_scale must be positive", "reward_scale");
  require(ue_beamwidth_deg > 0.0 && ap_beamwidth_deg > 0.0,
          "beamwidths must be positive");
  require(candidate_radius_factor > 0.0,
          "candidate_radius_factor must be positive",
          "candidate_radius_factor");
  require(rss_scale_db > 0.0, "rss_scale_db must be positive", "rss_scale_db");
  require(marl.hidden_m >= 1, "marl.hidden_m must be >= 1", "hidden_m");
  require(marl.learning_rate > 0.0, "marl.learning_rate must be positive",
          "learning_rate");
  require(marl.ppo_clip > 0.0, "marl.ppo_clip must be positive", "ppo_clip");
  require(marl.ppo_epochs >= 1, "marl.ppo_epochs must be >= 1", "ppo_epochs");
  require(marl.batch_size >= 1 && marl.minibatch_size >= 1 &&
              marl.minibatch_size <= marl.batch_size,
          "marl batch sizes must satisfy 1 <= minibatch <= batch",
          "minibatch_size");
  require(marl.episode_slots >= 1, "marl.episode_slots must be >= 1",
          "episode_slots");
  require(marl.train_episodes >= 1, "marl.train_episodes must be >= 1",
          "train_episodes");
  require(marl.eval_interval >= 1, "marl.eval_interval must be >= 1",
          "eval_interval");
  require(marl.eval_deployments >= 1 && marl.eval_slots >= 1,
          "marl eval settings must be >= 1", "eval_deployments");
  require(marl.neighborhood_radius >= 0.0,
          "marl.neighborhood_radius must be nonnegative",
          "neighborhood_radius");
}

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config root must be a JSON object");

  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (!core_keys().count(key) && !extended_keys().count(key))
      throw ConfigError("unknown config key: " + key, key);
  }
  for (const std::string& key : core_keys())
    if (!j.contains(key))
      throw ConfigError("missing required config key: " + key, key);

  ScenarioConfig c;
  c.n_ues = get_as<int>(j, "n_ues");
  c.n_aps = get_as<int>(j, "n_aps");
  c.slot_duration = get_as<double>(j, "slot_duration");
  c.signaling_fraction = get_as<double>(j, "signaling_fraction");
  c.bandwidth = get_as<double>(j, "bandwidth");
  c.noise_psd = get_as<double>(j, "noise_psd");
  c.bits_per_unit = get_as<double>(j, "bits_per_unit");
  c.units_per_cycle = get_as<double>(j, "units_per_cycle");
  c.cpu_freq_set = get_as<std::vector<double>>(j, "cpu_freq_set");
  c.switched_capacitance = get_as<double>(j, "switched_capacitance");
  c.ue_power_on = get_as<double>(j, "ue_power_on");
  c.ue_power_off = get_as<double>(j, "ue_power_off");
  c.ap_power_on = get_as<double>(j, "ap_power_on");
  c.ap_power_off = get_as<double>(j, "ap_power_off");
  c.es_power_on = get_as<double>(j, "es_power_on");
  c.es_power_off = get_as<double>(j, "es_power_off");
  c.max_tx_power = get_as<double>(j, "max_tx_power");
  c.target_snr_db = get_as<double>(j, "target_snr_db");
  c.ap_capacity = get_as<int>(j, "ap_capacity");
  c.arrival_mean = get_as<double>(j, "arrival_mean");
  c.delay_target = get_as<double>(j, "delay_target");
  c.lyapunov_weight = get_as<double>(j, "lyapunov_weight");
  {
    auto w = get_as<std::vector<double>>(j, "energy_weights");
    require(w.size() == 3, "energy_weights must have exactly 3 entries",
            "energy_weights");
    c.energy_weights = {w[0], w[1], w[2]};
  }
  c.cell_radius = get_as<double>(j, "cell_radius");
  c.inter_cell_distance = get_as<double>(j, "inter_cell_distance");
  c.pathloss_exponent = get_as<double>(j, "pathloss_exponent");
  c.shadowing_variance_db = get_as<double>(j, "shadowing_variance_db");
  c.backlobe_gain_db = get_as<double>(j, "backlobe_gain_db");
  c.rng_seed = get_as<std::uint64_t>(j, "rng_seed");

  if (j.contains("epsilon1")) c.epsilon1 = get_as<double>(j, "epsilon1");
  if (j.contains("epsilon2")) c.epsilon2 = get_as<double>(j, "epsilon2");
  if (j.contains("consistent_tau"))
    c.consistent_tau = get_as<bool>(j, "consistent_tau");
  if (j.contains("reward_scale"))
    c.reward_scale = get_as<double>(j, "reward_scale");
  if (j.contains("fail_reward"))
    c.fail_reward = get_as<double>(j, "fail_reward");
  if (j.contains("ue_max_gain_db"))
    c.ue_max_gain_db = get_as<double>(j, "ue_max_gain_db");
  if (j.contains("ap_max_gain_db"))
    c.ap_max_gain_db = get_as<double>(j, "ap_max_gain_db");
  if (j.contains("ue_beamwidth_deg"))
    c.ue_beamwidth_deg = get_as<double>(j, "ue_beamwidth_deg");
  if (j.contains("ap_beamwidth_deg"))
    c.ap_beamwidth_deg = get_as<double>(j, "ap_beamwidth_deg");
  if (j.contains("candidate_radius_factor"))
    c.candidate_radius_factor = get_as<double>(j, "candidate_radius_factor");
  if (j.contains("exhaustive_guard_bits"))
    c.exhaustive_guard_bits = get_as<double>(j, "exhaustive_guard_bits");
  if (j.contains("rss_offset_dbm"))
    c.rss_offset_dbm = get_as<double>(j, "rss_offset_dbm");
  if (j.contains("rss_scale_db"))
    c.rss_scale_db = get_as<double>(j, "rss_scale_db");

  if (j.contains("marl")) {
    const auto& m = j.at("marl");
    require(m.is_object(), "marl must be a JSON object", "marl");
    for (const auto& item : m.items())
      if (!marl_keys().count(item.key()))
        throw ConfigError("unknown config key: marl." + item.key(),
                          "marl." + item.key());
    MarlConfig& mc = c.marl;
    if (m.contains("hidden_m")) mc.hidden_m = get_as<int>(m, "hidden_m");
    if (m.contains("learning_rate"))
      mc.learning_rate = get_as<double>(m, "learning_rate");
    if (m.contains("ppo_clip")) mc.ppo_clip = get_as<double>(m, "ppo_clip");
    if (m.contains("entropy_coef"))
      mc.entropy_coef = get_as<double>(m, "entropy_coef");
    if (m.contains("value_coef"))
      mc.value_coef = get_as<double>(m, "value_coef");
    if (m.contains("ppo_epochs")) mc.ppo_epochs = get_as<int>(m, "ppo_epochs");
    if (m.contains("batch_size")) mc.batch_size = get_as<int>(m, "batch_size");
    if (m.contains("minibatch_size"))
      mc.minibatch_size = get_as<int>(m, "minibatch_size");
    if (m.contains("episode_slots"))
      mc.episode_slots = get_as<int>(m, "episode_slots");
    if (m.contains("train_episodes"))
      mc.train_episodes = get_as<int>(m, "train_episodes");
    if (m.contains("eval_interval"))
      mc.eval_interval = get_as<int>(m, "eval_interval");
    if (m.contains("eval_deployments"))
      mc.eval_deployments = get_as<int>(m, "eval_deployments");
    if (m.contains("eval_slots")) mc.eval_slots = get_as<int>(m, "eval_slots");
    if (m.contains("neighborhood_radius"))
      mc.neighborhood_radius = get_as<double>(m, "neighborhood_radius");
  }

  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ScenarioConfig::to_json_text() const {
  ordered_json j;
  // alphabetical within each block so the dump is canonical
  j["ap_capacity"] = ap_capacity;
  j["ap_power_off"] = ap_power_off;
  j["ap_power_on"] = ap_power_on;
  j["arrival_mean"] = arrival_mean;
  j["backlobe_gain_db"] = backlobe_gain_db;
  j["bandwidth"] = bandwidth;
  j["bits_per_unit"] = bits_per_unit;
  j["cell_radius"] = cell_radius;
  j["cpu_freq_set"] = cpu_freq_set;
  j["delay_target"] = delay_target;
  j["energy_weights"] = energy_weights;
  j["es_power_off"] = es_power_off;
  j["es_power_on"] = es_power_on;
  j["inter_cell_distance"] = inter_cell_distance;
  j["lyapunov_weight"] = lyapunov_weight;
  j["max_tx_power"] = max_tx_power;
  j["n_aps"] = n_aps;
  j["n_ues"] = n_ues;
  j["noise_psd"] = noise_psd;
  j["pathloss_exponent"] = pathloss_exponent;
  j["rng_seed"] = rng_seed;
  j["shadowing_variance_db"] = shadowing_variance_db;
  j["signaling_fraction"] = signaling_fraction;
  j["slot_duration"] = slot_duration;
  j["switched_capacitance"] = switched_capacitance;
  j["target_snr_db"] = target_snr_db;
  j["ue_power_off"] = ue_power_off;
  j["ue_power_on"] = ue_power_on;
  j["units_per_cycle"] = units_per_cycle;

  j["candidate_radius_factor"] = candidate_radius_factor;
  j["consistent_tau"] = consistent_tau;
  j["epsilon1"] = epsilon1;
  j["epsilon2"] = epsilon2;
  j["exhaustive_guard_bits"] = exhaustive_guard_bits;
  j["fail_reward"] = fail_reward;
  j["reward_scale"] = reward_scale;
  j["rss_offset_dbm"] = rss_offset_dbm;
  j["rss_scale_db"] = rss_scale_db;
  j["ue_max_gain_db"] = ue_max_gain_db;
  j["ap_max_gain_db"] = ap_max_gain_db;
  j["ue_beamwidth_deg"] = ue_beamwidth_deg;
  j["ap_beamwidth_deg"] = ap_beamwidth_deg;

  ordered_json m;
  m["batch_size"] = marl.batch_size;
  m["entropy_coef"] = marl.entropy_coef;
  m["episode_slots"] = marl.episode_slots;
  m["eval_deployments"] = marl.eval_deployments;
  m["eval_interval"] = marl.eval_interval;
  m["eval_slots"] = marl.eval_slots;
  m["hidden_m"] = marl.hidden_m;
  m["learning_rate"] = marl.learning_rate;
  m["minibatch_size"] = marl.minibatch_size;
  m["neighborhood_radius"] = marl.neighborhood_radius;
  m["ppo_clip"] = marl.ppo_clip;
  m["ppo_epochs"] = marl.ppo_epochs;
  m["train_episodes"] = marl.train_episodes;
  m["value_coef"] = marl.value_coef;
  j["marl"] = m;

  return j.dump(2);
}

std::uint64_t ScenarioConfig::hash() const {
  const std::string text = to_json_text();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace edgeoff
