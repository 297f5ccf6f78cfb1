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

// Forward-path (microphone to loudspeaker) filter families and gain
// calibration against the maximum stable gain.

#ifndef AFCLAB_FORWARD_PATHS_HPP_
#define AFCLAB_FORWARD_PATHS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "afclab/metrics.hpp"
#include "afclab/signals.hpp"

namespace afclab {

enum class ForwardPathKind { kFir, kIirAllpass, kDelay };

std::string to_string(ForwardPathKind kind);
ForwardPathKind parse_forward_path_kind(const std::string& name);

// For kDelay the filter is a pure delay of `length - 1` samples, so `alpha`
// is implied by `length`.
struct ForwardPathSpec {
  ForwardPathKind kind = ForwardPathKind::kDelay;
  std::size_t length = 15;  // numerator taps, L_GN
  std::size_t alpha = 1;    // leading zero taps
  std::uint64_t seed = 1;
};

// [0 x alpha, x_0 .. x_{L-alpha-1}] with x ~ N(0, 1), unit gain.
RationalFilter make_fir_forward(std::size_t length, std::size_t alpha,
                                std::uint64_t seed);

// Numerator [0 x alpha, x_0 .. x_{L-alpha-2}, 1], denominator its reversal.
// Random draws with poles outside radius 1 are pulled in to radius 0.9 by
// substituting z -> z / rho; if that still fails the seed is advanced.
RationalFilter make_iir_allpass(std::size_t length, std::size_t alpha,
                                std::uint64_t seed);

// [0 x delay, 1]. delay = 0 is only accepted with allow_zero (test use).
RationalFilter make_delay(std::size_t delay, bool allow_zero = false);

RationalFilter make_forward_path(const ForwardPathSpec& spec);

// Number of exactly-zero leading numerator taps.
std::size_t leading_delay(const RationalFilter& g);

// Gain g such that msg(g * g_unit, f) == margin_db on `grid`.
double calibrate_gain(const RationalFilter& g_unit, const FirCoeffs& f,
                      double margin_db,
                      const FrequencyGrid& grid = FrequencyGrid());

}  // namespace afclab

#endif  // AFCLAB_FORWARD_PATHS_HPP_
