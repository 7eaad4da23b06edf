// SPDX-License-Identifier: Apache-2.0
#include "maee/experiment_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

namespace maee {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw Error(ErrorCode::ConfigError, "bad value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw Error(ErrorCode::ConfigError, "bad boolean '" + std::string(text) + "' for " + std::string(key));
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

template <typename T>
Setter set(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
    c.*field = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"num_users", set(&ExperimentConfig::num_users)},
      {"num_bs_antennas", set(&ExperimentConfig::num_bs_antennas)},
      {"num_paths", set(&ExperimentConfig::num_paths)},
      {"wavelength", set(&ExperimentConfig::wavelength)},
      {"region_size", set(&ExperimentConfig::region_size)},
      {"initial_fraction", set(&ExperimentConfig::initial_fraction)},
      {"reference_path_loss_db", set(&ExperimentConfig::reference_path_loss_db)},
      {"distance", set(&ExperimentConfig::distance)},
      {"path_loss_exponent", set(&ExperimentConfig::path_loss_exponent)},
      {"max_power_dbm", set(&ExperimentConfig::max_power_dbm)},
      {"noise_power_dbm", set(&ExperimentConfig::noise_power_dbm)},
      {"comm_efficiency", set(&ExperimentConfig::comm_efficiency)},
      {"energy_rate", set(&ExperimentConfig::energy_rate)},
      {"speed", set(&ExperimentConfig::speed)},
      {"block_duration", set(&ExperimentConfig::block_duration)},
      {"min_throughput", set(&ExperimentConfig::min_throughput)},
      {"circuit_energy", set(&ExperimentConfig::circuit_energy)},
      {"trials", set(&ExperimentConfig::trials)},
      {"seed", set(&ExperimentConfig::base_seed)},
      {"num_subregions", set(&ExperimentConfig::num_subregions)},
      {"epsilon1", set(&ExperimentConfig::epsilon1)},
      {"epsilon2", set(&ExperimentConfig::epsilon2)},
      {"max_outer", set(&ExperimentConfig::max_outer)},
      {"sweep", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.sweep = parse_sweep(trim(v)); }},
      {"sweep_values",
       [](ExperimentConfig& c, std::string_view, std::string_view v) { c.sweep_values = parse_number_list(v); }},
      {"schemes",
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.schemes.clear();
         for (const auto item : split(v)) c.schemes.push_back(parse_scheme(item));
       }},
      {"record_time",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.record_time = parse_bool(k, v); }},
  };
  return table;
}

}  // namespace

SweepKind parse_sweep(std::string_view name) {
  if (name == "none") return SweepKind::None;
  if (name == "region_size") return SweepKind::RegionSize;
  if (name == "energy_rate") return SweepKind::EnergyRate;
  if (name == "speed") return SweepKind::Speed;
  if (name == "block_duration") return SweepKind::BlockDuration;
  if (name == "convergence_trace") return SweepKind::ConvergenceTrace;
  throw Error(ErrorCode::ConfigError, "unknown sweep '" + std::string(name) + "'");
}

std::string_view sweep_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::None: return "none";
    case SweepKind::RegionSize: return "region_size";
    case SweepKind::EnergyRate: return "energy_rate";
    case SweepKind::Speed: return "speed";
    case SweepKind::BlockDuration: return "block_duration";
    case SweepKind::ConvergenceTrace: return "convergence_trace";
  }
  return "none";
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (const auto item : split(text)) out.push_back(parse_number<double>("list", item));
  return out;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::ConfigError, "unknown key '" + std::string(key) + "'");
  it->second(cfg, key, value);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    view = trim(view.substr(0, view.find('#')));
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(number) + ": expected key = value");
    apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
  return parse_config(in);
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::ConfigError, what);
  };
  require(num_users >= 1, "num_users must be >= 1");
  require(num_bs_antennas >= 1, "num_bs_antennas must be >= 1");
  require(num_paths >= 1, "num_paths must be >= 1");
  require(wavelength > 0, "wavelength must be positive");
  require(region_size > 0, "region_size must be positive");
  require(initial_fraction >= 0 && initial_fraction <= 1, "initial_fraction must lie in [0, 1]");
  require(distance > 0, "distance must be positive");
  require(comm_efficiency > 0 && comm_efficiency < 1, "comm_efficiency must lie in (0, 1)");
  require(energy_rate >= 0, "energy_rate must be non-negative");
  require(speed > 0, "speed must be positive");
  require(block_duration > 0, "block_duration must be positive");
  require(min_throughput >= 0, "min_throughput must be non-negative");
  require(circuit_energy >= 0, "circuit_energy must be non-negative");
  require(trials >= 1, "trials must be >= 1");
  require(!schemes.empty(), "schemes must be non-empty");
  require(num_subregions >= 0, "num_subregions must be >= 0");
  require(epsilon1 > 0 && epsilon2 > 0, "tolerances must be positive");
  require(max_outer >= 1, "max_outer must be >= 1");
  const bool valued = sweep != SweepKind::None && sweep != SweepKind::ConvergenceTrace;
  require(!valued || !sweep_values.empty(), "sweep_values must be non-empty for this sweep");
}

SystemScenario scenario_for(const ExperimentConfig& cfg, double sweep_value) {
  SystemScenario s = SystemScenario::table_defaults(cfg.num_users);
  s.block_duration = cfg.sweep == SweepKind::BlockDuration ? sweep_value : cfg.block_duration;
  s.noise_power = dbm_to_watt(cfg.noise_power_dbm);
  s.channel.reference_path_loss = db_to_linear(cfg.reference_path_loss_db);
  s.channel.distance = cfg.distance;
  s.channel.path_loss_exponent = cfg.path_loss_exponent;
  s.channel.num_paths = cfg.num_paths;
  s.channel.num_bs_antennas = cfg.num_bs_antennas;
  s.channel.wavelength = cfg.wavelength;
  const double region = (cfg.sweep == SweepKind::RegionSize ? sweep_value : cfg.region_size) * cfg.wavelength;
  for (UserEnergyProfile& u : s.users) {
    u.energy_rate = cfg.sweep == SweepKind::EnergyRate ? sweep_value : cfg.energy_rate;
    u.speed = cfg.sweep == SweepKind::Speed ? sweep_value : cfg.speed;
    u.comm_efficiency = cfg.comm_efficiency;
    u.region_length = region;
    u.initial_position = cfg.initial_fraction * region;
    u.circuit_energy = cfg.circuit_energy;
  }
  s.max_power.assign(static_cast<std::size_t>(cfg.num_users), dbm_to_watt(cfg.max_power_dbm));
  s.min_throughput.assign(static_cast<std::size_t>(cfg.num_users), cfg.min_throughput);
  s.validate();
  return s;
}

SchemeOptions scheme_options(const ExperimentConfig& cfg) {
  SchemeOptions o;
  o.num_subregions = cfg.num_subregions;
  o.power_tolerance = cfg.epsilon1;
  o.multi_user.tolerance = cfg.epsilon2;
  o.multi_user.max_outer = cfg.max_outer;
  return o;
}

}  // namespace maee
