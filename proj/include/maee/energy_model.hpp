// SPDX-License-Identifier: Apache-2.0
//
// Motor and communication energy accounting for one transmission block.
// SI units throughout: W, J, m, s. Throughput is in bits/Hz over the block.

#ifndef MAEE_ENERGY_MODEL_HPP
#define MAEE_ENERGY_MODEL_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "maee/channel.hpp"

namespace maee {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct MotorSpec {
  double motor_constant;         // K_m, N m / A
  double peak_current;           // I, A
  double conversion_efficiency;  // eta_m in (0, 1]
  double rotation_radius;        // r, m
};

/// Joules per metre of travel, K_m I / (eta_m r).
double energy_rate(const MotorSpec& spec);

struct UserEnergyProfile {
  double energy_rate{0.175};      // J/m
  double comm_efficiency{0.5};    // eta_c in (0, 1)
  double speed{0.1};              // m/s
  double initial_position{0.005}; // m
  double region_length{0.01};     // m
  double circuit_energy{0.0};     // J per block, added to the communication energy

  void validate() const;
};

struct SystemScenario {
  double block_duration{2.0};  // T, s
  double noise_power{1e-10};   // sigma^2, W
  std::vector<double> max_power;       // P_max per user, W
  std::vector<double> min_throughput;  // R_TH per user, bits/Hz
  std::vector<UserEnergyProfile> users;
  ChannelParams<double> channel;

  int num_users() const { return static_cast<int>(users.size()); }
  void validate() const;

  /// Default simulation parameters for K identical users placed mid-region.
  static SystemScenario table_defaults(int num_users);
};

double dbm_to_watt(double dbm);
double db_to_linear(double db);

double motor_energy(const UserEnergyProfile& profile, double x);
double motor_energy_3d(const Eigen::Vector3d& rates, const Eigen::Vector3d& from, const Eigen::Vector3d& to);
double movement_delay(const UserEnergyProfile& profile, double x);

/// Longest movement delay over users; it shortens every user's communication phase.
double max_movement_delay(const SystemScenario& scenario, std::span<const double> positions);

double sinr(const MatrixXcd& combining, const MatrixXcd& channels, std::span<const double> powers,
            double noise_power, int k);
VectorXd sinr_all(const MatrixXcd& combining, const MatrixXcd& channels, std::span<const double> powers,
                  double noise_power);

struct BlockMetrics {
  double comm_time{};  // T - max_k delay_k, shared by all users
  VectorXd sinr;
  VectorXd throughput;         // bits/Hz
  VectorXd energy;             // J
  VectorXd energy_efficiency;  // bits/Hz/J, 0 where the energy is 0
  std::vector<bool> zero_energy;
  std::vector<bool> meets_throughput;

  double min_energy_efficiency() const { return energy_efficiency.minCoeff(); }
  bool feasible() const;
};

BlockMetrics block_metrics(const SystemScenario& scenario, std::span<const Channel> channels,
                           std::span<const double> positions, std::span<const double> powers,
                           const MatrixXcd& combining);

}  // namespace maee

#endif  // MAEE_ENERGY_MODEL_HPP
