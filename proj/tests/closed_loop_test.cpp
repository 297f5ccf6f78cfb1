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

#include "afclab/closed_loop.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "afclab/forward_paths.hpp"
#include "afclab/signals.hpp"

namespace afclab {
namespace {

Safeguards unclipped() {
  Safeguards s;
  s.clipping = false;
  return s;
}

Signal impulse(std::size_t n, double fs = kDefaultSampleRate) {
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  return Signal(x, fs);
}

// Returns a fixed estimate and counts observations.
class FixedController : public LoopController {
 public:
  explicit FixedController(std::vector<double> taps) : taps_(std::move(taps)) {}
  void observe(std::size_t k, std::span<const double> m,
               std::span<const double> l) override {
    EXPECT_EQ(m.size(), k + 1);
    EXPECT_EQ(l.size(), k + 1);
    ++observed;
  }
  std::vector<double> estimate() const override { return taps_; }
  std::size_t observed = 0;

 private:
  std::vector<double> taps_;
};

TEST(SimulateTest, NoFeedbackNoGain) {
  const Signal s = white_noise(200, 1);
  const auto res = simulate(FirCoeffs{0.0}, RationalFilter(FirCoeffs{0.0}), s,
                            nullptr, Safeguards{});
  EXPECT_EQ(res.m.samples, s.samples);
  for (double v : res.l.samples) EXPECT_EQ(v, 0.0);
}

TEST(SimulateTest, HandRecursion) {
  const RationalFilter g = make_delay(1).scaled(0.5);
  const auto res = simulate(FirCoeffs{0.4}, g, impulse(6), nullptr, Safeguards{});
  const std::vector<double> m{1.0, 0.2, 0.04, 0.008};
  const std::vector<double> l{0.0, 0.5, 0.1, 0.02};
  for (std::size_t k = 0; k < m.size(); ++k) {
    EXPECT_NEAR(res.m[k], m[k], 1e-15);
    EXPECT_NEAR(res.l[k], l[k], 1e-15);
  }
}

TEST(SimulateTest, RejectsAlgebraicLoop) {
  EXPECT_THROW(simulate(FirCoeffs{0.1}, RationalFilter(FirCoeffs{1.0}),
                        impulse(4), nullptr, Safeguards{}),
               Error);
}

TEST(SimulateTest, LoudspeakerClipsToAmplitudeLimit) {
  // Unstable loop: l grows geometrically until saturated.
  const RationalFilter g = make_delay(1).scaled(3.0);
  const auto res = simulate(FirCoeffs{1.0}, g, impulse(40), nullptr, Safeguards{});
  bool saturated = false;
  for (double v : res.l.samples) {
    EXPECT_LE(std::abs(v), 1.0);
    if (std::abs(v) == 1.0) saturated = true;
  }
  EXPECT_TRUE(saturated);
  EXPECT_GT(res.trace.amplitude_clip_events, 0u);
  EXPECT_EQ(res.l[1], 1.0);
}

TEST(SimulateTest, Causality) {
  const FirCoeffs f(white_noise(16, 2).samples);
  const RationalFilter g = make_iir_allpass(8, 1, 3).scaled(0.05);
  Signal s = white_noise(300, 4);
  const auto a = simulate(f, g, s, nullptr, unclipped());
  const std::size_t k0 = 150;
  s.samples[k0] += 1.0;
  const auto b = simulate(f, g, s, nullptr, unclipped());
  for (std::size_t k = 0; k < k0; ++k) {
    EXPECT_EQ(a.m[k], b.m[k]);
    EXPECT_EQ(a.l[k], b.l[k]);
  }
  EXPECT_EQ(a.l[k0], b.l[k0]);
  EXPECT_NE(a.m[k0], b.m[k0]);
}

TEST(SimulateTest, OpenLoopEquivalence) {
  const RationalFilter g = make_iir_allpass(10, 2, 5).scaled(0.7);
  const Signal s = white_noise(500, 6);
  const auto res = simulate(FirCoeffs(std::vector<double>(8, 0.0)), g, s, nullptr,
                            unclipped());
  EXPECT_EQ(res.m.samples, s.samples);
  const Signal ref = iir_filter(g, s);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(res.l[k], ref[k], 1e-12);
}

TEST(SimulateTest, PerfectCancellationOpensTheLoop) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const FirCoeffs f(white_noise(24, 10 + seed).samples);
    const RationalFilter g = make_fir_forward(12, 1, 20 + seed).scaled(0.3);
    const Signal s = white_noise(2000, 30 + seed);
    SimulationOptions opt;
    opt.initial_canceller = f;
    const auto res = simulate(f, g, s, nullptr, unclipped(), opt);
    const Signal l_ref = iir_filter(g, s);
    const Signal fl = fir_filter(f, l_ref);
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_NEAR(res.l[k], l_ref[k], 1e-10);
      EXPECT_NEAR(res.m[k] - fl[k], s[k], 1e-10);
    }
  }
}

TEST(SimulateTest, LinearWithoutClippingOrController) {
  const FirCoeffs f(white_noise(16, 40).samples);
  const RationalFilter g = make_fir_forward(6, 1, 41).scaled(0.1);
  const Signal s = white_noise(400, 42);
  std::vector<double> doubled(s.samples);
  for (double& v : doubled) v *= 2.0;
  const auto a = simulate(f, g, s, nullptr, unclipped());
  const auto b = simulate(f, g, Signal(doubled), nullptr, unclipped());
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_NEAR(b.m[k], 2.0 * a.m[k], 1e-12 * (1.0 + std::abs(a.m[k])));
    EXPECT_NEAR(b.l[k], 2.0 * a.l[k], 1e-12 * (1.0 + std::abs(a.l[k])));
  }
}

TEST(SimulateTest, ControllerTakesOverAfterWarmup) {
  const double fs = 100.0;
  const FirCoeffs f{0.0, 0.3};
  const RationalFilter g = make_delay(1).scaled(0.5);
  Safeguards sg = unclipped();
  sg.warmup_s = 0.2;  // 20 samples
  FixedController ctl({0.0, 0.3});
  SimulationOptions opt;
  opt.snapshot_interval = 10;
  const Signal s = white_noise(60, 50, fs);
  const auto res = simulate(f, g, s, &ctl, sg, opt);
  EXPECT_EQ(ctl.observed, 60u);
  ASSERT_EQ(res.trace.snapshots.size(), 6u);
  EXPECT_EQ(res.trace.snapshots[1].k, 10u);
  EXPECT_EQ(res.trace.snapshots[1].taps, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(res.trace.snapshots[2].taps, (std::vector<double>{0.0, 0.3}));
}

TEST(SimulateTest, EstimateCoefficientsAreClipped) {
  FixedController ctl({25.0, -12.0});
  Safeguards sg;
  sg.warmup_s = 0.0;
  SimulationOptions opt;
  opt.snapshot_interval = 5;
  const auto res = simulate(FirCoeffs{0.0, 0.1}, make_delay(1).scaled(0.1),
                            white_noise(20, 51), &ctl, sg, opt);
  EXPECT_GT(res.trace.coefficient_clip_events, 0u);
  EXPECT_EQ(res.trace.snapshots.back().taps, (std::vector<double>{10.0, -10.0}));
}

TEST(ClipCoefficientsTest, CountsAndSaturates) {
  std::vector<double> taps{0.5, 11.0, -30.0, 10.0};
  EXPECT_EQ(clip_coefficients(taps, 10.0), 2u);
  EXPECT_EQ(taps, (std::vector<double>{0.5, 10.0, -10.0, 10.0}));
}

}  // namespace
}  // namespace afclab
