#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "edgeoff/config.hpp"
#include "edgeoff/policy.hpp"
#include "edgeoff/rng.hpp"

using namespace edgeoff;
namespace fs = std::filesystem;

#ifndef EDGEOFF_CLI_BIN
#error "EDGEOFF_CLI_BIN must point at the command-line binary"
#endif

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("edgeoff_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string cmd = std::string(EDGEOFF_CLI_BIN) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

// small scenario so exhaustive scans stay cheap
fs::path write_config(const fs::path& dir, int n_ues = 2, int n_aps = 1) {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.n_ues = n_ues;
  cfg.n_aps = n_aps;
  const fs::path p = dir / "config.json";
  std::ofstream(p) << cfg.to_json_text();
  return p;
}

int data_rows(const std::string& csv) {
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  return lines - 2;  // preamble + header
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("no subcommand is a usage error") {
  const fs::path dir = scratch_dir("usage");
  const CliResult r = run_cli("", dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("config validation failures report the offending key") {
  const fs::path dir = scratch_dir("badcfg");
  ScenarioConfig cfg = ScenarioConfig::defaults();
  std::string text = cfg.to_json_text();
  const fs::path p = dir / "bad.json";
  {
    std::string broken = text;
    const std::string needle = "\"n_ues\":";
    const std::size_t at = broken.find(needle);
    REQUIRE(at != std::string::npos);
    const std::size_t end = broken.find(',', at);
    broken.replace(at, end - at, "\"n_ues\": -3");
    std::ofstream(p) << broken;
  }
  const CliResult r = run_cli(
      "simulate --config " + p.string() + " --out " + (dir / "o").string(),
      dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("\"error\"") != std::string::npos);
  CHECK(r.err.find("n_ues") != std::string::npos);
}

TEST_CASE("simulate writes traces, metrics, and a summary") {
  const fs::path dir = scratch_dir("simulate");
  const fs::path cfg = write_config(dir);
  const fs::path out = dir / "run";
  const CliResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                                  out.string() + " --slots 30 --seed 5",
                              dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("simulate:") != std::string::npos);

  const std::string metrics = slurp(out / "metrics.csv");
  CHECK(metrics.rfind("# config_hash=", 0) == 0);
  CHECK(data_rows(metrics) == 1);  // one deployment
  CHECK(data_rows(slurp(out / "energy_trace.csv")) == 30);
  CHECK(data_rows(slurp(out / "queue_trace.csv")) == 60);  // slots * UEs
  CHECK(data_rows(slurp(out / "assoc_trace.csv")) == 60);
  const std::string summary = slurp(out / "run_summary.json");
  CHECK(summary.find("\"verb\": \"simulate\"") != std::string::npos);
  CHECK(summary.find("\"per_deployment\"") != std::string::npos);
}

TEST_CASE("identical seeds reproduce output files byte for byte") {
  const fs::path dir = scratch_dir("repro");
  const fs::path cfg = write_config(dir);
  const std::string common =
      "simulate --config " + cfg.string() + " --slots 40 --seed 11 --out ";
  const CliResult a = run_cli(common + (dir / "a").string(), dir);
  const CliResult b = run_cli(common + (dir / "b").string(), dir);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
  CHECK(slurp(dir / "a" / "queue_trace.csv") ==
        slurp(dir / "b" / "queue_trace.csv"));
  CHECK(slurp(dir / "a" / "energy_trace.csv") ==
        slurp(dir / "b" / "energy_trace.csv"));
  // a different seed must change the traces
  const CliResult c = run_cli("simulate --config " + cfg.string() +
                                  " --slots 40 --seed 12 --out " +
                                  (dir / "c").string(),
                              dir);
  REQUIRE(c.exit_code == 0);
  CHECK(slurp(dir / "a" / "energy_trace.csv") !=
        slurp(dir / "c" / "energy_trace.csv"));
}

TEST_CASE("multi-deployment simulate honors --jobs deterministically") {
  const fs::path dir = scratch_dir("jobs");
  const fs::path cfg = write_config(dir);
  const std::string common = "simulate --config " + cfg.string() +
                             " --slots 25 --deployments 3 --seed 7 --out ";
  const CliResult a =
      run_cli(common + (dir / "j1").string() + " --jobs 1", dir);
  const CliResult b =
      run_cli(common + (dir / "j2").string() + " --jobs 2", dir);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  const std::string ma = slurp(dir / "j1" / "metrics.csv");
  CHECK(data_rows(ma) == 3);
  CHECK(ma == slurp(dir / "j2" / "metrics.csv"));
}

TEST_CASE("sweep-omega writes one row per weight") {
  const fs::path dir = scratch_dir("sweep");
  const fs::path cfg = write_config(dir);
  const std::string common = "sweep-omega --config " + cfg.string() +
                             " --omega-list 1e6,1e9 --slots 25 "
                             "--deployments 2 --seed 3 --out ";
  const CliResult a = run_cli(common + (dir / "s1").string(), dir);
  REQUIRE(a.exit_code == 0);
  const std::string csv = slurp(dir / "s1" / "omega_sweep.csv");
  CHECK(data_rows(csv) == 2);
  CHECK(csv.find("\n1e+06,") != std::string::npos);
  const CliResult b = run_cli(common + (dir / "s2").string(), dir);
  REQUIRE(b.exit_code == 0);
  CHECK(csv == slurp(dir / "s2" / "omega_sweep.csv"));
}

TEST_CASE("evaluate runs a saved checkpoint across UE counts") {
  const fs::path dir = scratch_dir("evaluate");
  const fs::path cfg_path = write_config(dir, 2, 1);
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.n_ues = 2;
  cfg.n_aps = 1;
  Rng rng(derive_seed(1, seed_stream::policy_init));
  PolicyParameters pp =
      PolicyParameters::create(8, cfg.n_aps, NormConstants::from_config(cfg),
                               rng);
  const fs::path ckpt = dir / "policy.ckpt";
  pp.save(ckpt.string());

  const CliResult r = run_cli("evaluate --config " + cfg_path.string() +
                                  " --checkpoint " + ckpt.string() +
                                  " --slots 30 --deployments 2 --out " +
                                  (dir / "e1").string(),
                              dir);
  CHECK(r.exit_code == 0);
  CHECK(data_rows(slurp(dir / "e1" / "metrics.csv")) == 2);

  // the shared-parameter policy must load unchanged for a different K
  const CliResult r4 = run_cli("evaluate --config " + cfg_path.string() +
                                   " --checkpoint " + ckpt.string() +
                                   " --slots 30 --deployments 2 --n-ues 4 "
                                   "--out " +
                                   (dir / "e4").string(),
                               dir);
  CHECK(r4.exit_code == 0);
  const std::string summary = slurp(dir / "e4" / "run_summary.json");
  CHECK(summary.find("\"n_ues\": 4") != std::string::npos);
}

TEST_CASE("evaluate without a readable checkpoint fails cleanly") {
  const fs::path dir = scratch_dir("nockpt");
  const fs::path cfg = write_config(dir);
  const CliResult r = run_cli("evaluate --config " + cfg.string() +
                                  " --checkpoint " +
                                  (dir / "missing.ckpt").string() +
                                  " --slots 10 --out " + (dir / "o").string(),
                              dir);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("\"error\"") != std::string::npos);
}

TEST_CASE("an unknown solver name is a configuration error") {
  const fs::path dir = scratch_dir("badsolver");
  const fs::path cfg = write_config(dir);
  const CliResult r = run_cli("simulate --config " + cfg.string() +
                                  " --solver psychic --slots 5 --out " +
                                  (dir / "o").string(),
                              dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("psychic") != std::string::npos);
}

TEST_CASE("an unreachable delay target exits with the calibration code") {
  const fs::path dir = scratch_dir("calfail");
  const fs::path cfg = write_config(dir);
  const CliResult r = run_cli("calibrate-duty-cycle --config " + cfg.string() +
                                  " --target-delay 1e-6 --slots 120 "
                                  "--deployments 1 --out " +
                                  (dir / "o").string(),
                              dir);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("\"error\"") != std::string::npos);
}

TEST_CASE("an oversized exhaustive search exits with the search-space code") {
  const fs::path dir = scratch_dir("toolarge");
  const fs::path cfg = write_config(dir, 30, 3);  // >= 2^30 options
  const CliResult r = run_cli("simulate --config " + cfg.string() +
                                  " --slots 1 --out " + (dir / "o").string(),
                              dir);
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("\"error\"") != std::string::npos);
}

TEST_CASE("compare writes one row per solver and UE count") {
  const fs::path dir = scratch_dir("compare");
  const fs::path cfg = write_config(dir);
  const CliResult r = run_cli("compare --config " + cfg.string() +
                                  " --solvers exhaustive,max-snr "
                                  "--k-list 2,3 --slots 20 --deployments 1 "
                                  "--seed 9 --out " +
                                  (dir / "o").string(),
                              dir);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir / "o" / "compare.csv");
  CHECK(data_rows(csv) == 4);
  CHECK(csv.find("exhaustive") != std::string::npos);
  CHECK(csv.find("max-snr") != std::string::npos);
}

}  // TEST_SUITE
