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

#include "afclab/forward_paths.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "afclab/metrics.hpp"
#include "afclab/signals.hpp"

namespace afclab {
namespace {

TEST(FirForwardTest, LeadingZerosAndLength) {
  const RationalFilter g = make_fir_forward(5, 3, 7);
  ASSERT_EQ(g.numerator().size(), 5u);
  EXPECT_TRUE(g.is_fir());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g.numerator()[i], 0.0);
  EXPECT_NE(g.numerator()[3], 0.0);
  EXPECT_EQ(leading_delay(g), 3u);
}

TEST(FirForwardTest, DeterministicAndMinimal) {
  EXPECT_EQ(make_fir_forward(12, 2, 9).numerator(),
            make_fir_forward(12, 2, 9).numerator());
  const RationalFilter g = make_fir_forward(2, 1, 4);
  ASSERT_EQ(g.numerator().size(), 2u);
  EXPECT_EQ(g.numerator()[0], 0.0);
}

TEST(FirForwardTest, RejectsBadDelay) {
  EXPECT_THROW(make_fir_forward(5, 5, 1), Error);
  EXPECT_THROW(make_fir_forward(5, 0, 1), Error);
}

TEST(AllpassTest, MinimalCaseIsPureDelay) {
  const RationalFilter g = make_iir_allpass(2, 1, 3);
  EXPECT_EQ(g.numerator(), (FirCoeffs{0.0, 1.0}));
  EXPECT_EQ(g.denominator(), FirCoeffs{1.0});
}

TEST(AllpassTest, DenominatorMirrorsNumerator) {
  for (std::size_t length : {3u, 8u, 15u, 30u}) {
    for (std::size_t alpha : {1u, 2u}) {
      const RationalFilter g = make_iir_allpass(length, alpha, 11 + length);
      std::vector<double> rev(g.numerator().vec().rbegin(),
                              g.numerator().vec().rend());
      while (rev.size() > 1 && rev.back() == 0.0) rev.pop_back();
      const double lead = rev.front();
      ASSERT_NE(lead, 0.0);
      ASSERT_EQ(rev.size(), g.denominator().size());
      for (std::size_t i = 0; i < rev.size(); ++i) {
        EXPECT_NEAR(rev[i] / lead, g.denominator()[i], 1e-15);
      }
      for (std::size_t i = 0; i < alpha; ++i) EXPECT_EQ(g.numerator()[i], 0.0);
    }
  }
}

TEST(AllpassTest, FlatMagnitudeResponse) {
  const FrequencyGrid grid(4096);
  for (std::size_t length = 2; length <= 30; ++length) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Spectrum h = freq_response(make_iir_allpass(length, 1, seed), grid);
      const double ref = std::abs(h[0]);
      double worst = 0.0;
      for (const auto& v : h) worst = std::max(worst, std::abs(std::abs(v) / ref - 1.0));
      EXPECT_LT(worst, 1e-9) << "length " << length << " seed " << seed;
    }
  }
}

TEST(AllpassTest, StableDenominator) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RationalFilter g = make_iir_allpass(25, 1, seed);
    EXPECT_LT(max_root_radius(g.denominator().taps()), 1.0);
  }
}

TEST(DelayTest, ShapesAndShift) {
  const RationalFilter d1 = make_delay(10);
  ASSERT_EQ(d1.numerator().size(), 11u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(d1.numerator()[i], 0.0);
  EXPECT_EQ(d1.numerator()[10], 1.0);

  ForwardPathSpec spec;
  spec.kind = ForwardPathKind::kDelay;
  spec.length = 15;
  EXPECT_EQ(make_forward_path(spec).numerator(), make_delay(14).numerator());

  const Signal x = white_noise(64, 5);
  const Signal y = iir_filter(make_delay(3), x);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(y[k], 0.0);
  for (std::size_t k = 3; k < x.size(); ++k) EXPECT_EQ(y[k], x[k - 3]);

  EXPECT_THROW(make_delay(0), Error);
  EXPECT_NO_THROW(make_delay(0, true));
}

TEST(CalibrateGainTest, FlatLoop) {
  const double g = calibrate_gain(make_delay(1), FirCoeffs{1.0}, 3.0);
  EXPECT_NEAR(g, std::pow(10.0, -3.0 / 20.0), 1e-12);
  EXPECT_NEAR(g, 0.7079, 1e-4);
}

TEST(CalibrateGainTest, HomogeneousInFeedbackScale) {
  const FirCoeffs f(white_noise(32, 21).samples);
  const RationalFilter g = make_fir_forward(15, 1, 22);
  const double base = calibrate_gain(g, f, 3.0);
  EXPECT_NEAR(calibrate_gain(g, f.scaled(2.0), 3.0), base / 2.0, 1e-10 * base);
  EXPECT_NEAR(calibrate_gain(g, f.scaled(7.5), 3.0), base / 7.5, 1e-10 * base);
}

TEST(CalibrateGainTest, ClosesMargin) {
  const FrequencyGrid grid;
  const FirCoeffs f(white_noise(64, 23).samples);
  for (const RationalFilter& g : {make_fir_forward(20, 2, 1), make_iir_allpass(15, 1, 2),
                                  make_delay(9)}) {
    const double c = calibrate_gain(g, f, 3.0, grid);
    EXPECT_NEAR(msg(g.scaled(c), f, grid), 3.0, 0.05);
  }
}

TEST(CalibrateGainTest, ZeroFeedbackIsAnError) {
  EXPECT_THROW(calibrate_gain(make_delay(1), FirCoeffs{0.0, 0.0, 0.0}, 3.0), Error);
}

}  // namespace
}  // namespace afclab
