#include "edgeoff/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace edgeoff {

double ue_energy(const std::vector<std::uint8_t>& active,
                 const std::vector<double>& tx_power,
                 const ScenarioConfig& config) {
  if (active.size() != tx_power.size())
    throw std::invalid_argument("ue_energy: size mismatch");
  const double tau = config.slot_duration;
  const double beta = config.signaling_fraction;
  double e = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (active[k]) {
      if (!std::isfinite(tx_power[k]) || tx_power[k] < 0.0)
        throw std::invalid_argument(
            "ue_energy: active UE without a valid tx power");
      e += tau * ((1.0 - beta) * (config.ue_power_on + tx_power[k]) +
                  beta * config.ue_power_on);
    } else {
      if (tx_power[k] != 0.0)
        throw std::invalid_argument("ue_energy: idle UE with nonzero tx power");
      e += tau * ((1.0 - beta) * config.ue_power_off +
                  beta * config.ue_power_on);
    }
  }
  return e;
}

double ap_energy(const std::vector<std::uint8_t>& active,
                 const ScenarioConfig& config) {
  const double tau = config.slot_duration;
  const double beta = config.signaling_fraction;
  double e = 0.0;
  for (std::size_t n = 0; n < active.size(); ++n) {
    const double p =
        active[n] ? config.ap_power_on : config.ap_power_off;
    e += tau * ((1.0 - beta) * p + beta * config.ap_power_on);
  }
  return e;
}

double es_energy(double f_c, const ScenarioConfig& config) {
  bool in_set = false;
  for (double f : config.cpu_freq_set)
    if (f == f_c) {
      in_set = true;
      break;
    }
  if (!in_set)
    throw std::invalid_argument(
        "es_energy: f_c is not a member of the frequency set");
  const double tau = config.slot_duration;
  const double beta = config.signaling_fraction;
  const double data = (1.0 - beta) * tau;
  if (f_c > 0.0) {
    const double dyn = config.switched_capacitance * f_c * f_c * f_c;
    return data * (config.es_power_on + dyn) + beta * tau * config.es_power_on;
  }
  return data * config.es_power_off + beta * tau * config.es_power_on;
}

double weighted_energy(double e_ue, double e_ap, double e_es,
                       const std::array<double, 3>& alpha) {
  double sum = 0.0;
  for (double a : alpha) {
    if (a < 0.0)
      throw std::invalid_argument("weighted_energy: negative weight");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("weighted_energy: weights must sum to 1");
  return alpha[0] * e_ue + alpha[1] * e_ap + alpha[2] * e_es;
}

EnergyReport slot_energy(const std::vector<std::uint8_t>& ue_active,
                         const std::vector<double>& tx_power,
                         const std::vector<std::uint8_t>& ap_active,
                         double f_c, const ScenarioConfig& config) {
  EnergyReport r;
  r.e_ue = ue_energy(ue_active, tx_power, config);
  r.e_ap = ap_energy(ap_active, config);
  r.e_es = es_energy(f_c, config);
  r.e_total = r.e_ue + r.e_ap + r.e_es;
  r.e_weighted =
      weighted_energy(r.e_ue, r.e_ap, r.e_es, config.energy_weights);
  return r;
}

}  // namespace edgeoff
