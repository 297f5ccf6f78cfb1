// Copyright 2026 The afclab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "afclab/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "afclab/forward_paths.hpp"
#include "afclab/scenario.hpp"
#include "afclab/signals.hpp"

namespace afclab {
namespace {

constexpr double kSixDb = 6.020599913279624;  // 20 log10(2)

TEST(FrequencyGridTest, UniformOnHalfBand) {
  const FrequencyGrid grid(65);
  EXPECT_EQ(grid.omega(0), 0.0);
  EXPECT_DOUBLE_EQ(grid.omega(64), std::numbers::pi);
  EXPECT_DOUBLE_EQ(grid.omega(32), std::numbers::pi / 2);
  EXPECT_THROW(FrequencyGrid(63), Error);
}

TEST(FreqResponseTest, ImpulseAndDelay) {
  const FrequencyGrid grid(128);
  for (const auto& v : freq_response(FirCoeffs{1.0}, grid)) EXPECT_EQ(v, 1.0);
  const Spectrum d = freq_response(FirCoeffs{0.0, 1.0}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ref = std::polar(1.0, -grid.omega(i));
    EXPECT_NEAR(std::abs(d[i] - ref), 0.0, 1e-15);
  }
}

TEST(FreqResponseTest, MatchesDftOracle) {
  // Grid omega_i = pi i / (n - 1) is the (2n - 2)-point DFT's first half.
  const FirCoeffs f(white_noise(16, 3).samples);
  const std::size_t n = 257;
  const std::size_t nfft = 2 * (n - 1);
  const Spectrum h = freq_response(f, FrequencyGrid(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < f.size(); ++t) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(i * t % nfft) /
                           static_cast<double>(nfft);
      acc += f[t] * std::polar(1.0, phase);
    }
    EXPECT_NEAR(std::abs(h[i] - acc), 0.0, 1e-10);
  }
}

TEST(FreqResponseTest, RationalIsRatio) {
  const RationalFilter g(FirCoeffs{0.5, 0.2}, FirCoeffs{1.0, -0.3});
  const FrequencyGrid grid(64);
  const Spectrum h = freq_response(g, grid);
  const Spectrum num = freq_response(g.numerator(), grid);
  const Spectrum den = freq_response(g.denominator(), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(std::abs(h[i] - num[i] / den[i]), 0.0, 1e-14);
  }
}

TEST(CriticalSetTest, FindsCrossingsIncludingNyquist) {
  const FrequencyGrid grid(1024);
  // Unit delay: phase -omega is a multiple of 2 pi only at omega = 0.
  const CriticalSet one = critical_frequencies(freq_response(FirCoeffs{0.0, 1.0}, grid));
  ASSERT_EQ(one.crossings.size(), 1u);
  EXPECT_EQ(one.crossings[0].index, 0u);
  // Two-sample delay: phase -2 omega hits -2 pi at omega = pi.
  const CriticalSet two =
      critical_frequencies(freq_response(FirCoeffs{0.0, 0.0, 1.0}, grid));
  ASSERT_EQ(two.crossings.size(), 2u);
  EXPECT_EQ(two.crossings[1].index, grid.size() - 1);
  // Negative gain at dc: no crossing at 0 for -z^-1, crossing at pi.
  const CriticalSet neg = critical_frequencies(freq_response(FirCoeffs{0.0, -1.0}, grid));
  ASSERT_EQ(neg.crossings.size(), 1u);
  EXPECT_EQ(neg.crossings[0].index, grid.size() - 1);
}

TEST(CriticalSetTest, InterpolatesBetweenGridPoints) {
  // z^-3: crossing at omega = 2 pi / 3, between grid points for n = 100.
  const FrequencyGrid grid(100);
  const CriticalSet set = critical_frequencies(freq_response(FirCoeffs{0, 0, 0, 1}, grid));
  ASSERT_EQ(set.crossings.size(), 2u);
  const auto& c = set.crossings[1];
  const double omega = grid.omega(c.index) +
                       c.frac * (grid.omega(c.index + 1) - grid.omega(c.index));
  EXPECT_NEAR(omega, 2.0 * std::numbers::pi / 3.0, 1e-3);
}

TEST(MsgTest, FlatLoopAnchors) {
  const FrequencyGrid grid;
  const RationalFilter g = make_delay(1).scaled(0.5);
  EXPECT_NEAR(msg(g, FirCoeffs{1.0}, grid), kSixDb, 0.01);
  EXPECT_NEAR(msg(g.scaled(2.0), FirCoeffs{1.0}, grid), 0.0, 0.01);
  EXPECT_NEAR(msg(g, FirCoeffs{1.0}, grid) - msg(g.scaled(2.0), FirCoeffs{1.0}, grid),
              kSixDb, 0.01);
  EXPECT_THROW(msg(g, FirCoeffs{0.0, 0.0}, grid), Error);
}

TEST(CriticalSetTest, EmptySetUsesWholeGrid) {
  // Negative real response everywhere: no phase crossing at a 2 pi multiple.
  const Spectrum h{{-1.0, 0.0}, {-2.0, 0.5}, {-3.0, -0.5}, {-0.5, 0.0}};
  const CriticalSet set = critical_frequencies(h);
  EXPECT_TRUE(set.empty());
  EXPECT_NEAR(max_on_critical_set(h, set), std::abs(h[2]), 1e-15);
}

TEST(AsgTest, Anchors) {
  const FrequencyGrid grid;
  const RationalFilter g = make_delay(1).scaled(0.5);
  const FirCoeffs f{1.0};
  EXPECT_EQ(asg(g, f, FirCoeffs{0.0}, grid), 0.0);
  const GainResult perfect = asg_detail(g, f, f, grid);
  EXPECT_EQ(perfect.db, kClampDb);
  EXPECT_NE(perfect.flags & kFlagAsgClamped, 0u);
  EXPECT_NEAR(asg(g, f, FirCoeffs{0.5}, grid), kSixDb, 0.01);
}

TEST(AsgTest, ZeroEstimateIsExactlyZeroOnRandomLoops) {
  const FrequencyGrid grid;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FirCoeffs f = make_feedback_path(64, seed, 12.0);
    const RationalFilter g = make_iir_allpass(15, 1, seed);
    EXPECT_EQ(asg(g, f, FirCoeffs(std::vector<double>(64, 0.0)), grid), 0.0);
  }
}

TEST(AsgTest, InvariantToMovingGainBetweenPaths) {
  const FrequencyGrid grid;
  const FirCoeffs f = make_feedback_path(64, 3, 12.0);
  const FirCoeffs fhat = make_feedback_path(64, 4, 12.0).scaled(0.1);
  const RationalFilter g = make_fir_forward(20, 2, 5);
  const double c = 3.3;
  const RationalFilter g_div = g.scaled(1.0 / c);
  EXPECT_NEAR(msg(g, f, grid), msg(g_div, f.scaled(c), grid), 1e-9);
  EXPECT_NEAR(asg(g, f, fhat, grid), asg(g_div, f.scaled(c), fhat.scaled(c), grid),
              1e-9);
}

TEST(MisalignmentTest, Anchors) {
  const FirCoeffs f{0.3, -0.2, 0.1};
  EXPECT_EQ(misalignment(f, f), -kClampDb);
  EXPECT_NEAR(misalignment(f, FirCoeffs{0.0}), 0.0, 1e-12);
  EXPECT_NEAR(misalignment(f, f.scaled(0.5)), -kSixDb, 0.01);
  EXPECT_THROW(misalignment(FirCoeffs{0.0, 0.0}, f), Error);
}

TEST(MsgTest, GridRefinementIsStable) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const FirCoeffs f = make_feedback_path(64, seed, 12.0);
    const RationalFilter g = make_iir_allpass(15, 1, seed);
    const double coarse = msg(g, f, FrequencyGrid(4096));
    const double fine = msg(g, f, FrequencyGrid(8192));
    EXPECT_LT(std::abs(coarse - fine), 0.1);
  }
}

TEST(FlagsTest, Names) {
  EXPECT_EQ(flags_to_string(kFlagNone), "");
  EXPECT_EQ(flags_to_string(kFlagIllConditioned | kFlagSingular),
            "ill_conditioned|singular");
}

}  // namespace
}  // namespace afclab
