// SPDX-License-Identifier: Apache-2.0
#include "maee/energy_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace maee {

namespace {

void check_region(const UserEnergyProfile& profile, double x) {
  const double slack = 1e-12 * std::max(1.0, profile.region_length);
  if (!(x >= -slack && x <= profile.region_length + slack))
    throw Error(ErrorCode::OutOfRegion,
                "position " + std::to_string(x) + " outside [0, " + std::to_string(profile.region_length) + "]");
}

}  // namespace

double energy_rate(const MotorSpec& spec) {
  if (!(spec.motor_constant > 0 && spec.peak_current > 0 && spec.rotation_radius > 0 &&
        spec.conversion_efficiency > 0 && spec.conversion_efficiency <= 1))
    throw Error(ErrorCode::InvalidArgument, "motor spec fields must be positive, efficiency <= 1");
  return spec.motor_constant * spec.peak_current / (spec.conversion_efficiency * spec.rotation_radius);
}

void UserEnergyProfile::validate() const {
  if (!(energy_rate >= 0)) throw Error(ErrorCode::InvalidArgument, "energy rate must be >= 0");
  if (!(comm_efficiency > 0 && comm_efficiency < 1))
    throw Error(ErrorCode::InvalidArgument, "communication efficiency must lie in (0, 1)");
  if (!(speed > 0)) throw Error(ErrorCode::InvalidArgument, "speed must be positive");
  if (!(region_length > 0)) throw Error(ErrorCode::InvalidArgument, "region length must be positive");
  if (!(initial_position >= 0 && initial_position <= region_length))
    throw Error(ErrorCode::InvalidArgument, "initial position outside the moving region");
  if (!(circuit_energy >= 0)) throw Error(ErrorCode::InvalidArgument, "circuit energy must be >= 0");
}

void SystemScenario::validate() const {
  if (!(block_duration > 0)) throw Error(ErrorCode::InvalidArgument, "block duration must be positive");
  if (!(noise_power > 0)) throw Error(ErrorCode::InvalidArgument, "noise power must be positive");
  const std::size_t k = users.size();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "scenario has no users");
  if (max_power.size() != k || min_throughput.size() != k)
    throw Error(ErrorCode::InvalidArgument, "per-user limits must have one entry per user");
  for (std::size_t i = 0; i < k; ++i) {
    users[i].validate();
    if (!(max_power[i] > 0)) throw Error(ErrorCode::InvalidArgument, "max power must be positive");
    if (!(min_throughput[i] >= 0)) throw Error(ErrorCode::InvalidArgument, "min throughput must be >= 0");
  }
}

SystemScenario SystemScenario::table_defaults(int num_users) {
  if (num_users < 1) throw Error(ErrorCode::InvalidArgument, "need at least one user");
  SystemScenario s;
  s.block_duration = 2.0;
  s.noise_power = dbm_to_watt(-70.0);
  s.channel.reference_path_loss = db_to_linear(-40.0);
  s.channel.distance = 50.0;
  s.channel.path_loss_exponent = 2.8;
  s.channel.num_paths = 10;
  s.channel.num_bs_antennas = 16;
  s.channel.wavelength = 0.01;
  const double region = s.channel.wavelength;
  UserEnergyProfile u;
  u.energy_rate = 0.175;
  u.comm_efficiency = 0.5;
  u.speed = 0.1;
  u.region_length = region;
  u.initial_position = region / 2;
  s.users.assign(static_cast<std::size_t>(num_users), u);
  s.max_power.assign(static_cast<std::size_t>(num_users), dbm_to_watt(10.0));
  s.min_throughput.assign(static_cast<std::size_t>(num_users), 0.8);
  return s;
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double motor_energy(const UserEnergyProfile& profile, double x) {
  check_region(profile, x);
  return profile.energy_rate * std::abs(x - profile.initial_position);
}

double motor_energy_3d(const Eigen::Vector3d& rates, const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  return rates.dot((to - from).cwiseAbs());
}

double movement_delay(const UserEnergyProfile& profile, double x) {
  if (!(profile.speed > 0)) throw Error(ErrorCode::InvalidArgument, "speed must be positive");
  return std::abs(x - profile.initial_position) / profile.speed;
}

double max_movement_delay(const SystemScenario& scenario, std::span<const double> positions) {
  if (positions.size() != scenario.users.size())
    throw Error(ErrorCode::InvalidArgument, "one position per user required");
  double d = 0.0;
  for (std::size_t k = 0; k < positions.size(); ++k) d = std::max(d, movement_delay(scenario.users[k], positions[k]));
  return d;
}

double sinr(const MatrixXcd& combining, const MatrixXcd& channels, std::span<const double> powers,
            double noise_power, int k) {
  const Eigen::Index num_users = channels.cols();
  if (combining.rows() != channels.rows() || combining.cols() != num_users ||
      static_cast<Eigen::Index>(powers.size()) != num_users)
    throw Error(ErrorCode::InvalidArgument, "combining/channel/power dimensions disagree");
  if (k < 0 || k >= num_users) throw Error(ErrorCode::InvalidArgument, "user index out of range");
  const auto w = combining.col(k);
  const double wn = w.squaredNorm();
  if (wn == 0.0) throw Error(ErrorCode::ZeroCombiner, "combining vector of user " + std::to_string(k) + " is zero");
  double signal = 0.0;
  double interference = wn * noise_power;
  for (Eigen::Index j = 0; j < num_users; ++j) {
    const double term = std::norm(w.dot(channels.col(j))) * powers[static_cast<std::size_t>(j)];
    if (j == k)
      signal = term;
    else
      interference += term;
  }
  return signal / interference;
}

VectorXd sinr_all(const MatrixXcd& combining, const MatrixXcd& channels, std::span<const double> powers,
                  double noise_power) {
  VectorXd out(channels.cols());
  for (Eigen::Index k = 0; k < channels.cols(); ++k)
    out[k] = sinr(combining, channels, powers, noise_power, static_cast<int>(k));
  return out;
}

bool BlockMetrics::feasible() const {
  return std::all_of(meets_throughput.begin(), meets_throughput.end(), [](bool b) { return b; });
}

BlockMetrics block_metrics(const SystemScenario& scenario, std::span<const Channel> channels,
                           std::span<const double> positions, std::span<const double> powers,
                           const MatrixXcd& combining) {
  const std::size_t k_users = scenario.users.size();
  if (channels.size() != k_users || positions.size() != k_users || powers.size() != k_users)
    throw Error(ErrorCode::InvalidArgument, "one channel, position and power per user required");
  for (std::size_t k = 0; k < k_users; ++k) {
    check_region(scenario.users[k], positions[k]);
    if (!(powers[k] >= 0 && powers[k] <= scenario.max_power[k] * (1 + 1e-12)))
      throw Error(ErrorCode::InvalidArgument, "power of user " + std::to_string(k) + " outside [0, P_max]");
  }

  BlockMetrics m;
  m.comm_time = scenario.block_duration - max_movement_delay(scenario, positions);
  if (!(m.comm_time > 0))
    throw Error(ErrorCode::BlockExhausted, "movement delay consumes the whole block");

  const MatrixXcd h = channel_matrix<double>(channels, positions);
  m.sinr = sinr_all(combining, h, powers, scenario.noise_power);
  const auto n = static_cast<Eigen::Index>(k_users);
  m.throughput.resize(n);
  m.energy.resize(n);
  m.energy_efficiency.resize(n);
  m.zero_energy.assign(k_users, false);
  m.meets_throughput.assign(k_users, false);
  for (std::size_t k = 0; k < k_users; ++k) {
    const auto& u = scenario.users[k];
    const auto i = static_cast<Eigen::Index>(k);
    m.throughput[i] = m.comm_time * std::log2(1.0 + m.sinr[i]);
    m.energy[i] = u.energy_rate * std::abs(positions[k] - u.initial_position) +
                  powers[k] / u.comm_efficiency * m.comm_time + u.circuit_energy;
    if (m.energy[i] > 0) {
      m.energy_efficiency[i] = m.throughput[i] / m.energy[i];
    } else {
      m.energy_efficiency[i] = 0.0;
      m.zero_energy[k] = true;
    }
    const double r_th = scenario.min_throughput[k];
    m.meets_throughput[k] = !m.zero_energy[k] || r_th == 0.0;
    m.meets_throughput[k] = m.meets_throughput[k] && m.throughput[i] >= r_th - 1e-9 * std::max(1.0, r_th);
  }
  return m;
}

}  // namespace maee
