// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "maee/energy_model.hpp"
#include "support.hpp"

using namespace maee;

TEST(EnergyRate, MotorSpecification) {
  EXPECT_NEAR(energy_rate({0.035, 1.0, 1.0, 0.2}), 0.175, 1e-15);
  EXPECT_NEAR(energy_rate({0.035, 1.0, 0.5, 0.2}), 0.35, 1e-15);
  EXPECT_NEAR(energy_rate({0.035, 1.0, 1.0, 0.4}), 0.0875, 1e-15);
}

TEST(MotorEnergy, LinearInDistance) {
  UserEnergyProfile u;
  EXPECT_EQ(motor_energy(u, u.initial_position), 0.0);
  EXPECT_NEAR(motor_energy(u, 0.0), 8.75e-4, 1e-18);
  try {
    motor_energy(u, u.region_length + 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRegion);
  }
}

TEST(MotorEnergy, ThreeAxes) {
  const Eigen::Vector3d z = Eigen::Vector3d::Zero();
  EXPECT_EQ(motor_energy_3d({1, 2, 3}, z, z), 0.0);
  EXPECT_NEAR(motor_energy_3d({1, 2, 3}, z, {0.01, 0.01, 0.01}), 0.06, 1e-15);
  EXPECT_NEAR(motor_energy_3d({0.175, 0.175, 0.175}, z, {0.005, 0, 0}), 8.75e-4, 1e-18);
}

TEST(MovementDelay, DistanceOverSpeed) {
  UserEnergyProfile u;
  EXPECT_EQ(movement_delay(u, u.initial_position), 0.0);
  EXPECT_NEAR(movement_delay(u, 0.0), 0.05, 1e-15);
  u.speed = 0.2;
  EXPECT_NEAR(movement_delay(u, 0.0), 0.025, 1e-15);
}

TEST(Sinr, MatchedFilterAndOrthogonalUsers) {
  MatrixXcd h(2, 2);
  h << 1.0, 0.0, 0.0, 2.0;
  const double p[] = {0.5, 0.25};
  EXPECT_NEAR(sinr(h, h, p, 0.1, 0), 0.5 * 1.0 / 0.1, 1e-12);
  EXPECT_NEAR(sinr(h, h, p, 0.1, 1), 0.25 * 4.0 / 0.1, 1e-12);
  const double off[] = {0.0, 0.25};
  EXPECT_EQ(sinr(h, h, off, 0.1, 0), 0.0);
}

TEST(BlockMetrics, ArithmeticExample) {
  // gain p / sigma^2 = 1023 at the initial position: EE = 0.5 * 10 / 0.01.
  SystemScenario s = SystemScenario::table_defaults(1);
  s.noise_power = 1.0;
  const double g = std::sqrt(1023.0 / 0.01);
  const Channel c(CMatrixX<double>::Constant(1, 1, g), PathGeometry<double>::from_virtual_aod(VectorX<double>::Zero(1)),
                  0.01);
  const double x[] = {s.users[0].initial_position};
  const double p[] = {0.01};
  const BlockMetrics m = block_metrics(s, std::span<const Channel>(&c, 1), x, p, channel_vector(c, x[0]));
  EXPECT_NEAR(m.energy_efficiency[0], 500.0, 1e-9);
  EXPECT_NEAR(m.throughput[0], 20.0, 1e-12);
  EXPECT_TRUE(m.feasible());
}

TEST(BlockMetrics, MatchesOracleWithMovement) {
  std::mt19937_64 rng(7);
  SystemScenario s = SystemScenario::table_defaults(3);
  const auto ch = sample_channels(s.channel, 3, 17);
  const double x[] = {0.001, 0.005, 0.0093};
  const double p[] = {0.004, 0.007, 0.002};
  const MatrixXcd h = channel_matrix<double>(ch, x);
  // MMSE combining attains the oracle's SINR expression.
  MatrixXcd cov = s.noise_power * MatrixXcd::Identity(16, 16);
  for (int j = 0; j < 3; ++j) cov += p[j] * h.col(j) * h.col(j).adjoint();
  const MatrixXcd w = cov.ldlt().solve(h);
  const BlockMetrics m = block_metrics(s, ch, x, p, w);
  const std::vector<double> ref = oracle::mmse_energy_efficiency(
      maee::testing::to_links(ch), maee::testing::to_params(s), maee::testing::to_block(s), {x, x + 3}, {p, p + 3});
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(m.energy_efficiency[k], ref[static_cast<std::size_t>(k)], 1e-9 * ref[0]);
}

TEST(BlockMetrics, ExhaustedBlockThrows) {
  SystemScenario s = SystemScenario::table_defaults(1);
  s.block_duration = 0.04;
  const auto ch = sample_channels(s.channel, 1, 3);
  const double x[] = {0.0};
  const double p[] = {0.01};
  try {
    block_metrics(s, ch, x, p, channel_vector(ch[0], 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BlockExhausted);
  }
}

TEST(Scenario, DefaultsAndConversions) {
  const SystemScenario s = SystemScenario::table_defaults(4);
  EXPECT_EQ(s.num_users(), 4);
  EXPECT_NEAR(s.noise_power, 1e-10, 1e-22);
  EXPECT_NEAR(s.max_power[0], 0.01, 1e-15);
  EXPECT_NEAR(s.channel.reference_path_loss, 1e-4, 1e-18);
  EXPECT_NO_THROW(s.validate());
  EXPECT_THROW(SystemScenario::table_defaults(0), Error);
}
