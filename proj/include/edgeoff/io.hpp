#pragma once

#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "edgeoff/config.hpp"

namespace edgeoff {

// Shortest round-trippable decimal form; identical doubles give identical
// bytes, which is what makes reruns byte-comparable.
std::string csv_num(double v);

// First line of every output file: `# config_hash=<hex16> seed=<dec>`
void write_preamble(std::ostream& os, const ScenarioConfig& config,
                    std::uint64_t seed);

// Opens for writing, throws std::runtime_error on failure.
std::ofstream open_out(const std::string& path);

namespace trace {
inline constexpr const char* queue_header =
    "t,ue,arrivals,uplink_units,computed_units,q_local,q_server,z,q_avg,"
    "failed";
inline constexpr const char* energy_header =
    "t,e_ue,e_ap,e_es,e_weighted,e_total,f_c,g2,reward";
inline constexpr const char* assoc_header =
    "t,ue,action,ack,tx_power_w,sinr,rate_bps";
}  // namespace trace

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace edgeoff
