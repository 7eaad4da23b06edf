// SPDX-License-Identifier: Apache-2.0
//
// maee run --config exp.cfg [--sweep speed] [--schemes proposed,fpa] [--trials 20] [--seed 1]
//          [--set key=value ...] [--out results.csv]
// maee selftest [criterion ids...]
//
// Worker threads for `run` come from MAEE_WORKERS.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "criteria.hpp"
#include "maee/sweep.hpp"

namespace {

int run(const std::string& config_path, const std::string& sweep, const std::string& sweep_values,
        const std::string& schemes, int trials, long long seed, const std::vector<std::string>& settings,
        const std::string& out_path) {
  using namespace maee;
  ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  for (const std::string& kv : settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects key=value, got " + kv);
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!sweep.empty()) apply_setting(cfg, "sweep", sweep);
  if (!sweep_values.empty()) apply_setting(cfg, "sweep_values", sweep_values);
  if (!schemes.empty()) apply_setting(cfg, "schemes", schemes);
  if (trials > 0) cfg.trials = trials;
  if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
  cfg.validate();

  const std::vector<SweepRow> rows = run_sweep(cfg, workers_from_env());
  if (out_path.empty() || out_path == "-") {
    write_csv(std::cout, rows);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + out_path);
    write_csv(out, rows);
  }
  return 0;
}

int selftest(const std::vector<int>& ids) {
  using namespace maee::acceptance;
  std::vector<int> which = ids;
  if (which.empty())
    for (int id = 1; id <= kNumCriteria; ++id) which.push_back(id);
  int failed = 0;
  for (const int id : which) {
    const CriterionResult r = run_criterion(id);
    std::printf("%s\n", format(r).c_str());
    std::fflush(stdout);
    failed += !r.passed;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficiency optimization for movable-antenna uplinks"};
  app.require_subcommand(1);

  std::string config, sweep, sweep_values, schemes, out;
  int trials = 0;
  long long seed = -1;
  std::vector<std::string> settings;
  CLI::App* run_cmd = app.add_subcommand("run", "run a Monte-Carlo sweep and write CSV");
  run_cmd->add_option("--config", config, "key = value experiment file")->check(CLI::ExistingFile);
  run_cmd->add_option("--sweep", sweep, "none, region_size, energy_rate, speed, block_duration, convergence_trace");
  run_cmd->add_option("--values", sweep_values, "comma-separated sweep values");
  run_cmd->add_option("--schemes", schemes, "comma-separated: proposed, quantized[:Q], maxthroughput, maxsnr, fpa");
  run_cmd->add_option("--trials", trials, "trials per sweep value")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "base seed; trial t uses seed + t")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--set", settings, "override any config key, key=value");
  run_cmd->add_option("--out", out, "output CSV path (default stdout)");

  std::vector<int> ids;
  CLI::App* self_cmd = app.add_subcommand("selftest", "run the acceptance criteria");
  self_cmd->add_option("ids", ids, "criterion numbers (default all)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(config, sweep, sweep_values, schemes, trials, seed, settings, out);
    return selftest(ids);
  } catch (const maee::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
