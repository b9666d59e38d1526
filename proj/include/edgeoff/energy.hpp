#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "edgeoff/config.hpp"

namespace edgeoff {

struct EnergyReport {
  double e_ue = 0.0;
  double e_ap = 0.0;
  double e_es = 0.0;
  double e_total = 0.0;
  double e_weighted = 0.0;
};

// Eq.-4 style: active UEs burn p_on + p_tx over the data fraction, sleeping
// UEs p_off; every UE burns p_on over the signaling fraction.
// tx_power[k] must be 0 when inactive and finite when active.
double ue_energy(const std::vector<std::uint8_t>& active,
                 const std::vector<double>& tx_power,
                 const ScenarioConfig& config);

double ap_energy(const std::vector<std::uint8_t>& active,
                 const ScenarioConfig& config);

// f_c must be an exact member of the configured frequency set.
double es_energy(double f_c, const ScenarioConfig& config);

double weighted_energy(double e_ue, double e_ap, double e_es,
                       const std::array<double, 3>& alpha);

EnergyReport slot_energy(const std::vector<std::uint8_t>& ue_active,
                         const std::vector<double>& tx_power,
                         const std::vector<std::uint8_t>& ap_active,
                         double f_c, const ScenarioConfig& config);

}  // namespace edgeoff
