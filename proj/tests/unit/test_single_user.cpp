// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "maee/single_user.hpp"
#include "support.hpp"

using namespace maee;
using maee::testing::random_single_user;
using maee::testing::to_block;
using maee::testing::to_link;
using maee::testing::to_params;

namespace {

DinkelbachConstants consts() { return {1.95, 8.75e-4, 0.5, 1.0}; }

}  // namespace

TEST(Grid, Midpoints) {
  const GridSpec g = make_grid(0.01, 4);
  ASSERT_EQ(g.centers.size(), 4u);
  EXPECT_NEAR(g.centers[0], 0.00125, 1e-15);
  EXPECT_NEAR(g.centers[3], 0.00875, 1e-15);
  EXPECT_EQ(default_num_subregions(0.01, 0.01), 100);
  EXPECT_THROW(make_grid(0.01, 0), Error);
}

TEST(DinkelbachObjective, Arithmetic) {
  // gain p / sigma^2 = 3 with p = 0.01.
  EXPECT_NEAR(dinkelbach_objective(0.01, 1.0, 300.0, consts()), 3.860125, 1e-12);
  EXPECT_NEAR(dinkelbach_objective(0.0, 2.0, 300.0, consts()), -2.0 * 8.75e-4, 1e-15);
  EXPECT_NEAR(dinkelbach_objective(0.01, 0.0, 300.0, consts()), 1.95 * 2.0, 1e-12);
}

TEST(DinkelbachAlpha, NoMovementCancelsTime) {
  DinkelbachConstants c = consts();
  c.motor_energy = 0;
  EXPECT_NEAR(dinkelbach_alpha(0.01, 300.0, c), 0.5 * 2.0 / 0.01, 1e-9);
  EXPECT_EQ(dinkelbach_alpha(0.0, 300.0, consts()), 0.0);
  try {
    dinkelbach_alpha(0.0, 300.0, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroEnergy);
  }
}

TEST(UnconstrainedPower, ClosedFormAndStationarity) {
  EXPECT_NEAR(unconstrained_power(1.0, 10.0, 0.5, 1.0), 0.5 / std::numbers::ln2 - 0.1, 1e-12);
  EXPECT_EQ(unconstrained_power(100.0, 10.0, 0.5, 1.0), 0.0);
  // Parametric objective is stationary at the returned power.
  const DinkelbachConstants c = consts();
  const double alpha = 2.0, gain = 10.0;
  const double p = unconstrained_power(alpha, gain, c.comm_efficiency, c.noise_power);
  ASSERT_GT(p, 0);
  const double h = 1e-6;
  const double slope =
      (dinkelbach_objective(p + h, alpha, gain, c) - dinkelbach_objective(p - h, alpha, gain, c)) / (2 * h);
  EXPECT_NEAR(slope, 0.0, 1e-8);
  EXPECT_THROW(unconstrained_power(1.0, 0.0, 0.5, 1.0), Error);
}

TEST(PowerThreshold, MeetsFloorExactly) {
  EXPECT_EQ(power_threshold(0.0, 2.0, 1.0, 1.0, 1.0), 0.0);
  const double p = power_threshold(0.8, 1.9, 6e-9, 1e-10, 0.01);
  EXPECT_NEAR(1.9 * std::log2(1 + p * 6e-9 / 1e-10), 0.8, 1e-9);
  EXPECT_NEAR(power_threshold(0.8, 1.9, 1.2e-8, 1e-10, 0.01), p / 2, 1e-15);
  try {
    power_threshold(5.0, 1.0, 1e-12, 1e-10, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleThroughput);
  }
}

TEST(ClampPower, ThreeBranches) {
  EXPECT_EQ(clamp_power(0.001, 0.002, 0.01), 0.002);
  EXPECT_EQ(clamp_power(0.005, 0.002, 0.01), 0.005);
  EXPECT_EQ(clamp_power(0.02, 0.002, 0.01), 0.01);
}

TEST(OptimizePower, MonotoneAndMatchesGridOracle) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 30) {
    const SystemScenario s = random_single_user(rng);
    const Channel c = sample_channels(s.channel, 1, rng())[0];
    const double x = s.users[0].region_length * std::uniform_real_distribution<double>(0, 1)(rng);
    PowerSolution ps;
    try {
      ps = optimize_power(x, c, s, 1e-6);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    EXPECT_TRUE(ps.converged);
    for (std::size_t i = 1; i < ps.trace.size(); ++i)
      EXPECT_GE(ps.trace[i].energy_efficiency, ps.trace[i - 1].energy_efficiency - 1e-12);
    const auto [p_grid, ee_grid] = oracle::power_grid_search(to_link(c), to_params(s, 0), to_block(s), x, 100000);
    EXPECT_NEAR(ps.power, p_grid, 2 * s.max_power[0] / 100000);
    EXPECT_GE(ps.alpha, ee_grid * (1 - 1e-12));
    EXPECT_NEAR(ps.alpha, single_user_ee(x, ps.power, c, s), 1e-9 * ps.alpha);
  }
}

TEST(OptimizePower, InfeasibleFloor) {
  SystemScenario s = SystemScenario::table_defaults(1);
  s.min_throughput[0] = 100.0;
  const Channel c = sample_channels(s.channel, 1, 1)[0];
  try {
    optimize_power(0.005, c, s, 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleThroughput);
  }
}

TEST(ExhaustiveSearch, MatchesTwoDimensionalBruteForce) {
  std::mt19937_64 rng(12);
  int checked = 0;
  while (checked < 5) {
    const SystemScenario s = random_single_user(rng);
    const Channel c = sample_channels(s.channel, 1, rng())[0];
    const GridSpec grid = make_grid(s.users[0].region_length, 50);
    SingleUserSolution sol;
    try {
      sol = exhaustive_search(c, s, grid, 1e-6);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    double best = 0;
    for (const double x : grid.centers)
      best = std::max(best, oracle::power_grid_search(to_link(c), to_params(s, 0), to_block(s), x, 10000).second);
    EXPECT_NEAR(sol.energy_efficiency, best, 1e-3 * best);
    EXPECT_GE(sol.energy_efficiency, best * (1 - 1e-12));
  }
}

TEST(ExhaustiveSearch, ExpensiveMotorStaysHome) {
  SystemScenario s = SystemScenario::table_defaults(1);
  s.users[0].energy_rate = 1e6;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Channel c = sample_channels(s.channel, 1, seed)[0];
    try {
      const SingleUserSolution sol = exhaustive_search(c, s, 100, 1e-6);
      EXPECT_LE(std::abs(sol.position - 0.005), 0.00005 + 1e-12);
    } catch (const Error&) {
    }
  }
}

TEST(ExhaustiveSearch, GridRefinementIsConsistent) {
  const SystemScenario s = SystemScenario::table_defaults(1);
  const Channel c = sample_channels(s.channel, 1, 21)[0];
  const double coarse = exhaustive_search(c, s, 1000, 1e-6).energy_efficiency;
  const double fine = exhaustive_search(c, s, 10000, 1e-6).energy_efficiency;
  EXPECT_NEAR(coarse, fine, 0.005 * fine);
}

TEST(UpperBound, DominatesSearchOnTwoPathChannels) {
  std::mt19937_64 rng(13);
  SystemScenario s = SystemScenario::table_defaults(1);
  s.channel.num_paths = 2;
  for (int i = 0; i < 100; ++i) {
    const Channel c = sample_channels(s.channel, 1, rng())[0];
    const GridSpec grid = make_grid(0.01, 100);
    try {
      const SingleUserSolution sol = exhaustive_search(c, s, grid, 1e-6);
      EXPECT_LE(sol.energy_efficiency, ee_upper_bound(c, s, sol.power, grid) * (1 + 1e-12));
    } catch (const Error&) {
    }
  }
}

TEST(Quantized, EvaluatedOnTrueChannel) {
  const SystemScenario s = SystemScenario::table_defaults(1);
  const Channel c = sample_channels(s.channel, 1, 5)[0];
  const GridSpec grid = make_grid(0.01, 100);
  const QuantizedSolution q = quantized_search(c, s, grid, 10, 1e-6);
  EXPECT_NEAR(q.true_energy_efficiency, single_user_ee(q.planned.position, q.planned.power, c, s),
              1e-12 * q.true_energy_efficiency);
  if (q.feasible) EXPECT_LE(q.true_energy_efficiency, exhaustive_search(c, s, grid, 1e-6).energy_efficiency * (1 + 1e-9));
}
