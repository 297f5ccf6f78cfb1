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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace afclab {
namespace {

constexpr int kAllpassSeedRetries = 64;
constexpr double kAllpassPoleRadius = 0.9;
constexpr double kStabilityLimit = 1.0 - 1e-9;

void check_length_alpha(std::size_t length, std::size_t alpha,
                        const char* who) {
  if (alpha < 1) throw Error(std::string(who) + ": alpha must be >= 1");
  if (alpha >= length) {
    throw Error(std::string(who) + ": alpha must be smaller than the length");
  }
}

std::vector<double> reversed(const std::vector<double>& v) {
  return {v.rbegin(), v.rend()};
}

std::vector<double> trim_trailing_zeros(std::vector<double> v) {
  while (v.size() > 1 && v.back() == 0.0) v.pop_back();
  return v;
}

}  // namespace

std::string to_string(ForwardPathKind kind) {
  switch (kind) {
    case ForwardPathKind::kFir:
      return "fir";
    case ForwardPathKind::kIirAllpass:
      return "iir_ap";
    case ForwardPathKind::kDelay:
      return "delay";
  }
  return "?";
}

ForwardPathKind parse_forward_path_kind(const std::string& name) {
  if (name == "fir") return ForwardPathKind::kFir;
  if (name == "iir_ap" || name == "iir-ap" || name == "allpass") {
    return ForwardPathKind::kIirAllpass;
  }
  if (name == "delay") return ForwardPathKind::kDelay;
  throw Error("unknown forward path kind '" + name + "'");
}

RationalFilter make_fir_forward(std::size_t length, std::size_t alpha,
                                std::uint64_t seed) {
  check_length_alpha(length, alpha, "make_fir_forward");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> num(length, 0.0);
  for (std::size_t i = alpha; i < length; ++i) num[i] = normal(rng);
  return RationalFilter(FirCoeffs(std::move(num)));
}

RationalFilter make_iir_allpass(std::size_t length, std::size_t alpha,
                                std::uint64_t seed) {
  check_length_alpha(length, alpha, "make_iir_allpass");
  for (int attempt = 0; attempt < kAllpassSeedRetries; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> num(length, 0.0);
    for (std::size_t i = alpha; i + 1 < length; ++i) num[i] = normal(rng);
    num.back() = 1.0;

    // Denominator = reversed numerator; leading entry is the trailing 1.
    std::vector<double> den = trim_trailing_zeros(reversed(num));
    double radius = max_root_radius(den);
    if (radius >= kStabilityLimit) {
      const double rho = kAllpassPoleRadius / radius;
      double scale = 1.0;
      for (double& d : den) {
        d *= scale;
        scale *= rho;
      }
      radius = max_root_radius(den);
      // Keep the numerator the mirror image of the rescaled denominator.
      std::vector<double> padded = den;
      padded.resize(length, 0.0);
      num = reversed(padded);
    }
    if (radius < kStabilityLimit) {
      return RationalFilter(FirCoeffs(std::move(num)),
                            FirCoeffs(std::move(den)));
    }
  }
  throw Error("make_iir_allpass: no stable all-pass filter found after " +
              std::to_string(kAllpassSeedRetries) + " seeds starting at " +
              std::to_string(seed));
}

RationalFilter make_delay(std::size_t delay, bool allow_zero) {
  if (delay == 0 && !allow_zero) {
    throw Error("make_delay: a zero delay creates an algebraic loop");
  }
  std::vector<double> num(delay + 1, 0.0);
  num.back() = 1.0;
  return RationalFilter(FirCoeffs(std::move(num)));
}

RationalFilter make_forward_path(const ForwardPathSpec& spec) {
  switch (spec.kind) {
    case ForwardPathKind::kFir:
      return make_fir_forward(spec.length, spec.alpha, spec.seed);
    case ForwardPathKind::kIirAllpass:
      return make_iir_allpass(spec.length, spec.alpha, spec.seed);
    case ForwardPathKind::kDelay:
      if (spec.length < 2) throw Error("delay forward path needs length >= 2");
      return make_delay(spec.length - 1);
  }
  throw Error("make_forward_path: bad kind");
}

std::size_t leading_delay(const RationalFilter& g) {
  const auto num = g.numerator().taps();
  std::size_t d = 0;
  while (d < num.size() && num[d] == 0.0) ++d;
  return d;
}

double calibrate_gain(const RationalFilter& g_unit, const FirCoeffs& f,
                      double margin_db, const FrequencyGrid& grid) {
  const double unit_msg = msg(g_unit, f, grid);
  if (!std::isfinite(unit_msg)) throw Error("calibrate_gain: zero loop response");
  // msg(c g) = msg(g) - 20 log10(c)
  return std::pow(10.0, (unit_msg - margin_db) / 20.0);
}

}  // namespace afclab
