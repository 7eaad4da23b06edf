// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo sweeps over one scenario parameter. Trial t uses seed
// base_seed + t for every scheme and sweep point, so schemes in a cell see
// identical channels.

#ifndef MAEE_SWEEP_HPP
#define MAEE_SWEEP_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "maee/experiment_config.hpp"

namespace maee {

struct SweepRow {
  std::string scheme;
  std::string sweep_param;
  double sweep_value{};
  int trial{};
  std::uint64_t seed{};
  int user{};  // -1 for the per-cell aggregate
  double ee{};
  double min_ee{};
  double move_dist_norm{};
  double avg_move_dist_norm{};
  int iterations{};
  bool feasible{};
  double wall_ms{};
};

/// MAEE_WORKERS if set to a positive integer, else the hardware concurrency.
int workers_from_env();

/// Rows ordered by (sweep point, trial, scheme, user) with the aggregate row
/// last in each cell. A scheme that throws yields one aggregate row with
/// feasible = 0 and NaN metrics; the sweep goes on.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int workers = 1);

inline constexpr const char* kCsvHeader =
    "scheme,sweep_param,sweep_value,trial,seed,user,ee_bits_hz_j,min_ee,move_dist_norm,avg_move_dist_norm,"
    "iterations,feasible,wall_ms";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace maee

#endif  // MAEE_SWEEP_HPP
