// SPDX-License-Identifier: Apache-2.0
#include "maee/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

namespace maee {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Cell {
  double sweep_value;
  int trial;
};

std::vector<SweepRow> cell_rows(const ExperimentConfig& cfg, const Cell& cell) {
  const SystemScenario scenario = scenario_for(cfg, cell.sweep_value);
  const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(cell.trial);
  const std::vector<Channel> channels = sample_channels(scenario.channel, cfg.num_users, seed);
  const SchemeOptions options = scheme_options(cfg);
  const std::string param(sweep_name(cfg.sweep));

  std::vector<SweepRow> rows;
  for (const Scheme& scheme : cfg.schemes) {
    SweepRow base;
    base.scheme = scheme_name(scheme);
    base.sweep_param = param;
    base.sweep_value = cell.sweep_value;
    base.trial = cell.trial;
    base.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    SchemeOutcome out;
    try {
      out = run_scheme(scheme, scenario, channels, options);
    } catch (const Error&) {
      SweepRow r = base;
      r.user = -1;
      r.ee = r.min_ee = r.move_dist_norm = r.avg_move_dist_norm = kNaN;
      r.iterations = 0;
      r.feasible = false;
      rows.push_back(r);
      continue;
    }
    const double ms =
        cfg.record_time ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()
                        : 0.0;

    const int k_users = scenario.num_users();
    const double min_ee = out.metrics.min_energy_efficiency();
    double avg_move = 0;
    for (int k = 0; k < k_users; ++k)
      avg_move += std::abs(out.positions[k] - scenario.users[static_cast<std::size_t>(k)].initial_position) /
                  scenario.channel.wavelength;
    avg_move /= k_users;

    if (cfg.sweep == SweepKind::ConvergenceTrace) {
      std::vector<double> trace = out.min_ee_trace;
      if (trace.empty()) trace.push_back(min_ee);
      for (std::size_t i = 0; i < trace.size(); ++i) {
        SweepRow r = base;
        r.sweep_value = static_cast<double>(i);
        r.user = -1;
        r.ee = r.min_ee = trace[i];
        r.move_dist_norm = r.avg_move_dist_norm = avg_move;
        r.iterations = out.iterations;
        r.feasible = out.metrics.feasible();
        r.wall_ms = ms;
        rows.push_back(r);
      }
      continue;
    }

    for (int k = 0; k <= k_users; ++k) {
      SweepRow r = base;
      const bool aggregate = k == k_users;
      r.user = aggregate ? -1 : k;
      r.min_ee = min_ee;
      r.ee = aggregate ? min_ee : out.metrics.energy_efficiency[k];
      r.avg_move_dist_norm = avg_move;
      r.move_dist_norm =
          aggregate ? avg_move
                    : std::abs(out.positions[k] - scenario.users[static_cast<std::size_t>(k)].initial_position) /
                          scenario.channel.wavelength;
      r.iterations = out.iterations;
      r.feasible = aggregate ? out.metrics.feasible() : bool(out.metrics.meets_throughput[static_cast<std::size_t>(k)]);
      r.wall_ms = ms;
      rows.push_back(r);
    }
  }
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

int workers_from_env() {
  if (const char* env = std::getenv("MAEE_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  std::vector<double> values = cfg.sweep_values;
  if (cfg.sweep == SweepKind::None || cfg.sweep == SweepKind::ConvergenceTrace || values.empty()) values = {0.0};

  std::vector<Cell> cells;
  for (const double v : values) (void)scenario_for(cfg, v);  // reject bad sweep points before any work
  for (const double v : values)
    for (int t = 0; t < cfg.trials; ++t) cells.push_back({v, t});

  std::vector<std::vector<SweepRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = cell_rows(cfg, cells[i]);
  };
  const int n = std::clamp(workers, 1, static_cast<int>(cells.size()));
  std::vector<std::jthread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  pool.clear();

  std::vector<SweepRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.scheme << ',' << r.sweep_param << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
        << r.seed << ',' << r.user << ',' << format_double(r.ee) << ',' << format_double(r.min_ee) << ','
        << format_double(r.move_dist_norm) << ',' << format_double(r.avg_move_dist_norm) << ',' << r.iterations
        << ',' << (r.feasible ? 1 : 0) << ',' << format_double(r.wall_ms) << '\n';
  }
}

}  // namespace maee
