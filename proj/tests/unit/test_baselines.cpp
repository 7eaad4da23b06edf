// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "maee/baselines.hpp"

using namespace maee;

namespace {

std::vector<Channel> channels_for(const SystemScenario& s, std::uint64_t seed) {
  return sample_channels(s.channel, s.num_users(), seed);
}

}  // namespace

TEST(Schemes, ParseAndName) {
  EXPECT_EQ(parse_scheme("Proposed").kind, SchemeKind::Proposed);
  EXPECT_EQ(parse_scheme("FPA").kind, SchemeKind::Fpa);
  EXPECT_EQ(parse_scheme("maxsnr").kind, SchemeKind::MaxSnr);
  EXPECT_EQ(parse_scheme("max_throughput").kind, SchemeKind::MaxThroughput);
  const Scheme q = parse_scheme("quantized:15");
  EXPECT_EQ(q.kind, SchemeKind::Quantized);
  EXPECT_EQ(q.resolution, 15);
  EXPECT_EQ(scheme_name(q), "Quantized(15)");
  EXPECT_EQ(parse_scheme("quantized").resolution, 10);
  EXPECT_THROW(parse_scheme("quantized:0"), Error);
  EXPECT_THROW(parse_scheme("greedy"), Error);
}

TEST(Fpa, NeverMoves) {
  for (int users : {1, 3}) {
    const SystemScenario s = SystemScenario::table_defaults(users);
    const SchemeOutcome o = baseline_fpa(s, channels_for(s, 51));
    for (int k = 0; k < users; ++k) EXPECT_EQ(o.positions[k], s.users[static_cast<std::size_t>(k)].initial_position);
  }
}

TEST(Fpa, SingleUserEfficiencyCancelsTime) {
  const SystemScenario s = SystemScenario::table_defaults(1);
  const auto ch = channels_for(s, 52);
  const SchemeOutcome o = baseline_fpa(s, ch);
  const double snr = o.powers[0] * channel_gain(ch[0], o.positions[0]) / s.noise_power;
  EXPECT_NEAR(o.metrics.energy_efficiency[0], 0.5 * std::log2(1 + snr) / o.powers[0], 1e-9 * o.metrics.energy_efficiency[0]);
}

TEST(SingleUser, ProposedDominatesHeuristics) {
  const SystemScenario s = SystemScenario::table_defaults(1);
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    const auto ch = channels_for(s, seed);
    double best;
    try {
      best = proposed(s, ch).metrics.min_energy_efficiency();
    } catch (const Error&) {
      continue;
    }
    for (auto run : {baseline_max_snr, baseline_max_throughput}) {
      try {
        EXPECT_GE(best, run(s, ch, {}).metrics.min_energy_efficiency() * (1 - 1e-12));
      } catch (const Error&) {
      }
    }
  }
}

TEST(SingleUser, FastMotorMakesThroughputPickTheGainPeak) {
  SystemScenario s = SystemScenario::table_defaults(1);
  s.users[0].speed = 1e9;
  const auto ch = channels_for(s, 71);
  EXPECT_EQ(baseline_max_throughput(s, ch).positions[0], baseline_max_snr(s, ch).positions[0]);
}

TEST(SingleUser, FreeMotorMakesThroughputMatchProposedWhenFloorBinds) {
  // With zero motor energy and no delay, the rate-maximizing position also
  // maximizes the efficiency at the optimized power.
  SystemScenario s = SystemScenario::table_defaults(1);
  s.users[0].energy_rate = 0.0;
  s.users[0].speed = 1e9;
  const auto ch = channels_for(s, 72);
  EXPECT_NEAR(baseline_max_throughput(s, ch).metrics.energy_efficiency[0],
              proposed(s, ch).metrics.energy_efficiency[0], 1e-9 * proposed(s, ch).metrics.energy_efficiency[0]);
}

TEST(SingleUser, GainPeakAtStartMakesMaxSnrEqualFpa) {
  SystemScenario s = SystemScenario::table_defaults(1);
  const auto ch = channels_for(s, 73);
  const GridSpec grid = make_grid(0.01, 100);
  s.users[0].initial_position = grid.centers[static_cast<std::size_t>(argmax_gain(ch[0], grid, 0.005))];
  const SchemeOutcome a = baseline_max_snr(s, ch), b = baseline_fpa(s, ch);
  EXPECT_EQ(a.positions[0], b.positions[0]);
  EXPECT_DOUBLE_EQ(a.metrics.energy_efficiency[0], b.metrics.energy_efficiency[0]);
}

TEST(MultiUser, AllSchemesRunAndReportTrueMetrics) {
  const SystemScenario s = SystemScenario::table_defaults(2);
  const auto ch = channels_for(s, 74);
  for (const char* name : {"proposed", "fpa", "maxsnr", "maxthroughput", "quantized:10"}) {
    const SchemeOutcome o = run_scheme(parse_scheme(name), s, ch);
    EXPECT_EQ(o.positions.size(), 2);
    EXPECT_GT(o.metrics.min_energy_efficiency(), 0.0) << name;
  }
}

TEST(MultiUser, ProposedAtLeastFpa) {
  const SystemScenario s = SystemScenario::table_defaults(3);
  const auto ch = channels_for(s, 75);
  EXPECT_GE(proposed(s, ch).metrics.min_energy_efficiency(),
            baseline_fpa(s, ch).metrics.min_energy_efficiency() * (1 - 1e-12));
}
