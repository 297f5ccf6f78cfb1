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

// Frequency-domain evaluation of the feedback loop: frequency responses,
// maximum stable gain (MSG), added stable gain (ASG) and misalignment.

#ifndef AFCLAB_METRICS_HPP_
#define AFCLAB_METRICS_HPP_

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "afclab/signals.hpp"

namespace afclab {

using Spectrum = std::vector<std::complex<double>>;

inline constexpr std::size_t kDefaultGridPoints = 4096;
inline constexpr double kClampDb = 200.0;

// n uniformly spaced radial frequencies on [0, pi], endpoints included.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::size_t n_points = kDefaultGridPoints);

  std::size_t size() const { return n_; }
  double omega(std::size_t i) const;

 private:
  std::size_t n_;
};

Spectrum freq_response(const FirCoeffs& f, const FrequencyGrid& grid);
Spectrum freq_response(const RationalFilter& g, const FrequencyGrid& grid);

// Degeneracy markers carried through reports and CSV output.
enum Flag : std::uint32_t {
  kFlagNone = 0,
  kFlagEmptyCriticalSet = 1u << 0,  // no phase crossing, full-grid max used
  kFlagAsgClamped = 1u << 1,
  kFlagMisalignmentClamped = 1u << 2,
  kFlagIllConditioned = 1u << 3,
  kFlagSingular = 1u << 4,
  kFlagAmplitudeClipped = 1u << 5,
  kFlagCoefficientClipped = 1u << 6,
  kFlagRlsRollback = 1u << 7,
  kFlagRunFailed = 1u << 8,
};

std::string flags_to_string(std::uint32_t flags);

// Points of the grid (possibly between two grid points) where the loop phase
// is a multiple of 2*pi.
struct PhaseCrossing {
  std::size_t index = 0;  // left grid point
  double frac = 0.0;      // position in [0, 1) towards index + 1
};

struct CriticalSet {
  std::vector<PhaseCrossing> crossings;
  bool empty() const { return crossings.empty(); }
};

CriticalSet critical_frequencies(const Spectrum& loop);

// max over the critical set of |h|, linearly interpolated between grid points.
// With an empty set this is the max over the whole grid.
double max_on_critical_set(const Spectrum& h, const CriticalSet& set);

struct GainResult {
  double db = 0.0;
  std::uint32_t flags = kFlagNone;
};

GainResult msg_detail(const RationalFilter& g, const FirCoeffs& f,
                      const FrequencyGrid& grid);
double msg(const RationalFilter& g, const FirCoeffs& f,
           const FrequencyGrid& grid);

// Stability margin added by inserting f_hat as the canceller, evaluated on
// the critical set of the uncancelled loop G F.
GainResult asg_detail(const RationalFilter& g, const FirCoeffs& f,
                      const FirCoeffs& f_hat, const FrequencyGrid& grid);
double asg(const RationalFilter& g, const FirCoeffs& f, const FirCoeffs& f_hat,
           const FrequencyGrid& grid);

// 20 log10(||f - f_hat|| / ||f||), clamped at -200 dB.
double misalignment(const FirCoeffs& f, const FirCoeffs& f_hat);

struct MetricsReport {
  double msg_db = 0.0;
  double asg_db = 0.0;
  double kappa = 1.0;
  double misalignment_db = 0.0;
  std::uint32_t flags = kFlagNone;
};

}  // namespace afclab

#endif  // AFCLAB_METRICS_HPP_
