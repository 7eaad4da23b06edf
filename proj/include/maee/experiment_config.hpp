// SPDX-License-Identifier: Apache-2.0
//
// Experiment description: scenario parameters (flat keys, powers in dBm),
// the swept parameter, schemes, trial count and seed.
//
// File format: one `key = value` per line, `#` starts a comment. Lists are
// comma separated.

#ifndef MAEE_EXPERIMENT_CONFIG_HPP
#define MAEE_EXPERIMENT_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "maee/baselines.hpp"

namespace maee {

enum class SweepKind { None, RegionSize, EnergyRate, Speed, BlockDuration, ConvergenceTrace };

SweepKind parse_sweep(std::string_view name);
std::string_view sweep_name(SweepKind kind);

struct ExperimentConfig {
  int num_users{4};
  int num_bs_antennas{16};
  int num_paths{10};
  double wavelength{0.01};          // m
  double region_size{1.0};          // A / lambda
  double initial_fraction{0.5};     // x0 = initial_fraction * A
  double reference_path_loss_db{-40.0};
  double distance{50.0};            // m
  double path_loss_exponent{2.8};
  double max_power_dbm{10.0};
  double noise_power_dbm{-70.0};
  double comm_efficiency{0.5};
  double energy_rate{0.175};        // J/m
  double speed{0.1};                // m/s
  double block_duration{2.0};       // s
  double min_throughput{0.8};       // bits/Hz
  double circuit_energy{0.0};       // J

  SweepKind sweep{SweepKind::None};
  std::vector<double> sweep_values;
  std::vector<Scheme> schemes{{SchemeKind::Proposed}, {SchemeKind::Fpa}};
  int trials{1};
  std::uint64_t base_seed{1};
  int num_subregions{0};   // 0: 100 A / lambda
  double epsilon1{1e-6};   // Dinkelbach tolerance
  double epsilon2{1e-6};   // outer-loop tolerance
  int max_outer{50};
  bool record_time{false};

  void validate() const;
};

/// Sets one field from its textual key and value. Throws ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Scenario for one sweep point; the value is ignored for None and ConvergenceTrace.
SystemScenario scenario_for(const ExperimentConfig& cfg, double sweep_value);
SchemeOptions scheme_options(const ExperimentConfig& cfg);

std::vector<double> parse_number_list(std::string_view text);

}  // namespace maee

#endif  // MAEE_EXPERIMENT_CONFIG_HPP
