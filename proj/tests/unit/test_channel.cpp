// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "maee/channel.hpp"
#include "support.hpp"

using namespace maee;
using maee::testing::random_channel;
using maee::testing::to_link;

namespace {

Channel identity_channel(double a, double b) {
  VectorX<double> aod(2);
  aod << a, b;
  return Channel(CMatrixX<double>::Identity(2, 2), PathGeometry<double>::from_virtual_aod(aod), 0.01);
}

}  // namespace

TEST(VirtualAod, KnownAngles) {
  EXPECT_DOUBLE_EQ(virtual_aod(std::numbers::pi / 2, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(virtual_aod(0.0, 1.234), 0.0);
  EXPECT_NEAR(virtual_aod(std::numbers::pi / 4, std::numbers::pi / 3), 0.3535533905932738, 1e-15);
}

TEST(FieldResponse, ZeroAndQuarterWavelength) {
  VectorX<double> aod(2);
  aod << 1.0, -1.0;
  const CVectorX<double> f0 = field_response(0.0, aod, 0.01);
  EXPECT_NEAR(std::abs(f0[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f0[1] - 1.0), 0.0, 1e-15);
  const CVectorX<double> f = field_response(0.0025, aod, 0.01);
  EXPECT_NEAR(std::abs(f[0] - std::complex<double>(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f[1] - std::complex<double>(0, -1)), 0.0, 1e-15);
  const CVectorX<double> full = field_response(0.01, VectorX<double>(VectorX<double>::Ones(1)), 0.01);
  EXPECT_NEAR(std::abs(full[0] - 1.0), 0.0, 1e-14);
}

TEST(FieldResponse, RejectsBadWavelength) {
  EXPECT_THROW(field_response(0.0, VectorX<double>(VectorX<double>::Ones(1)), 0.0), Error);
}

TEST(ChannelVector, IdentityAtOrigin) {
  const CVectorX<double> h = channel_vector(identity_channel(0.5, -0.5), 0.0);
  EXPECT_NEAR(std::abs(h[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h[1] - 1.0), 0.0, 1e-15);
}

TEST(ChannelVector, MatchesOracleMatvec) {
  std::mt19937_64 rng(1);
  const Channel c = random_channel(rng, 3, 4);
  const CVectorX<double> h = channel_vector(c, 0.003);
  const std::vector<oracle::cd> ref = oracle::channel(to_link(c), 0.003);
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(std::abs(h[n] - ref[static_cast<std::size_t>(n)]), 0.0, 1e-14);
}

TEST(GainExpansion, IdentityHasNoCrossCoupling) {
  const GainExpansion<double> e = gain_expansion(identity_channel(0.5, -0.5));
  EXPECT_DOUBLE_EQ(e.constant_term, 2.0);
  ASSERT_EQ(e.cross_terms.size(), 1u);
  EXPECT_NEAR(e.cross_terms[0].magnitude, 0.0, 1e-15);
  EXPECT_NEAR(channel_gain(identity_channel(0.5, -0.5), 0.0037), 2.0, 1e-14);
}

TEST(GainExpansion, SinglePathIsFlat) {
  std::mt19937_64 rng(2);
  const Channel c = random_channel(rng, 1, 5);
  const GainExpansion<double> e = gain_expansion(c);
  EXPECT_TRUE(e.cross_terms.empty());
  EXPECT_NEAR(e.constant_term, c.path_response().squaredNorm(), 1e-12 * e.constant_term);
  EXPECT_NEAR(channel_gain(c, 0.001), channel_gain(c, 0.0071), 1e-12 * e.constant_term);
}

TEST(GainExpansion, MatchesOracleAndIsNonNegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(0.0, 0.02);
  for (int i = 0; i < 20; ++i) {
    const Channel c = random_channel(rng, 3, 2);
    const GainExpansion<double> e = gain_expansion(c);
    EXPECT_NEAR(e.constant_term, c.path_response().squaredNorm(), 1e-12 * e.constant_term);
    const oracle::Link link = to_link(c);
    for (int j = 0; j < 100; ++j) {
      const double x = xs(rng);
      const double ref = oracle::gain(link, x);
      EXPECT_NEAR(e.value(x), ref, 1e-10 * ref);
      EXPECT_GE(e.value(x), -1e-9);
    }
  }
}

TEST(GainExpansion, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  const GainExpansion<double> e = gain_expansion(random_channel(rng, 4, 3));
  const double x = 0.0043, h = 1e-7;
  EXPECT_NEAR(e.derivative(x), (e.value(x + h) - e.value(x - h)) / (2 * h), 1e-5 * std::abs(e.derivative(x)) + 1e-3);
  EXPECT_NEAR(e.second_derivative(x), (e.derivative(x + h) - e.derivative(x - h)) / (2 * h),
              1e-5 * e.curvature_bound());
  EXPECT_LE(std::abs(e.second_derivative(x)), e.curvature_bound());
}

TEST(TwoPathPeriod, KnownValueAndPeriodicity) {
  const Channel c = identity_channel(0.5, -0.5);
  EXPECT_NEAR(two_path_period(c), 0.01, 1e-15);
  std::mt19937_64 rng(5);
  const Channel r = random_channel(rng, 2, 3);
  const double chi = two_path_period(r);
  const oracle::Link link = to_link(r);
  std::uniform_real_distribution<double> xs(0.0, 0.02);
  for (int i = 0; i < 50; ++i) {
    const double x = xs(rng);
    EXPECT_NEAR(oracle::gain(link, x + chi), oracle::gain(link, x), 1e-9 * oracle::gain(link, x));
  }
}

TEST(TwoPathPeriod, CoincidentAodsAreDegenerate) {
  try {
    two_path_period(identity_channel(0.3, 0.3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegeneratePaths);
  }
}

TEST(QuantizedPeriod, GcdOfGaps) {
  const std::vector<int> a{1, 5, 9}, b{2, 5, 9}, c{1, 3};
  EXPECT_NEAR(quantized_period<double>(a, 10, 0.01), 0.0125, 1e-15);
  EXPECT_NEAR(quantized_period<double>(b, 10, 0.01), 0.05, 1e-15);
  EXPECT_NEAR(quantized_period<double>(c, 4, 0.01), 0.01, 1e-15);
}

TEST(QuantizedPeriod, GainRepeats) {
  std::mt19937_64 rng(6);
  const std::vector<int> q{1, 5, 9};
  VectorX<double> aod(3);
  for (int l = 0; l < 3; ++l) aod[l] = quantized_aod_value<double>(q[static_cast<std::size_t>(l)], 10);
  const Channel c = random_channel(rng, 3, 4).with_geometry(PathGeometry<double>::from_virtual_aod(aod));
  const double chi = quantized_period<double>(q, 10, 0.01);
  const oracle::Link link = to_link(c);
  for (const double x : {0.0, 0.0011, 0.0042, 0.0093})
    EXPECT_NEAR(oracle::gain(link, x + chi), oracle::gain(link, x), 1e-9 * oracle::gain(link, x));
}

TEST(Quantize, SnapsToNearestGridValue) {
  EXPECT_EQ(quantize_aod_index(-1.0, 10), 1);
  EXPECT_EQ(quantize_aod_index(1.0, 10), 10);
  EXPECT_EQ(quantize_aod_index(0.05, 10), 6);
  EXPECT_NEAR(quantized_aod_value<double>(6, 10), 0.1, 1e-15);
}

TEST(SampleChannel, DeterministicAndInRange) {
  ChannelParams<double> p;
  const auto a = sample_channels(p, 3, 99);
  const auto b = sample_channels(p, 3, 99);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(a[static_cast<std::size_t>(k)].path_response(), b[static_cast<std::size_t>(k)].path_response());
    EXPECT_LE(a[static_cast<std::size_t>(k)].virtual_aod().cwiseAbs().maxCoeff(), 1.0);
    EXPECT_EQ(a[static_cast<std::size_t>(k)].num_paths(), 10);
    EXPECT_EQ(a[static_cast<std::size_t>(k)].num_bs_antennas(), 16);
  }
}

TEST(SampleChannel, EntryVarianceMatchesPathLoss) {
  ChannelParams<double> p;
  p.num_bs_antennas = 1;
  double sum = 0, sum2 = 0;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    const Channel c = sample_channels(p, 1, 1000 + static_cast<std::uint64_t>(i))[0];
    for (Eigen::Index l = 0; l < c.num_paths(); ++l) {
      const double v = std::norm(c.path_response()(l, 0));
      sum += v;
      sum2 += v * v;
    }
  }
  const double n = kDraws * 10.0;
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, p.entry_variance(), 3 * se);
}
