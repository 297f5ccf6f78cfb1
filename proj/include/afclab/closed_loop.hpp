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

// Sample-accurate simulation of the microphone/loudspeaker feedback loop
//
//   m[k] = F(q) l[k] + s[k]
//   l[k] = G(q) (m[k] - F0(q) l[k])
//
// with an optional per-sample controller that re-estimates F0.
//
// Per sample k the order is fixed:
//   1. l[k] from strictly past samples (G has at least one sample delay),
//      saturated to +-amp_clip;
//   2. m[k] = f . [l[k] .. l[k-L_F+1]] + s[k];
//   3. the canceller output u[k] = m[k] - F0 . [l[k] ..] feeds G;
//   4. the controller observes m[0..k], l[0..k]. From sample
//      warmup * fs onwards its (clipped) estimate replaces F0 before k+1.

#ifndef AFCLAB_CLOSED_LOOP_HPP_
#define AFCLAB_CLOSED_LOOP_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "afclab/signals.hpp"

namespace afclab {

struct Safeguards {
  double coeff_clip = 10.0;
  double amp_clip = 1.0;
  double warmup_s = 1.0;
  // Off only for linearity-based tests.
  bool clipping = true;
};

class LoopController {
 public:
  virtual ~LoopController() = default;

  // m and l hold samples 0..k inclusive.
  virtual void observe(std::size_t k, std::span<const double> m,
                       std::span<const double> l) = 0;

  // Current feedback-path estimate; same length as the in-loop canceller.
  virtual std::vector<double> estimate() const = 0;
};

struct SimulationOptions {
  // In-loop canceller at k = 0; defaults to zeros of the feedback length.
  std::optional<FirCoeffs> initial_canceller;
  // Record F0 every this many samples (0 = never).
  std::size_t snapshot_interval = 0;
};

struct CancellerSnapshot {
  std::size_t k = 0;
  std::vector<double> taps;
};

struct SimulationTrace {
  std::vector<CancellerSnapshot> snapshots;
  std::size_t amplitude_clip_events = 0;
  std::size_t coefficient_clip_events = 0;
};

struct SimulationResult {
  Signal m;
  Signal l;
  SimulationTrace trace;
};

// Thrown when a sample turns non-finite even with the safeguards active.
class SimulationError : public Error {
 public:
  SimulationError(std::size_t k, const std::string& what);
  std::size_t sample() const { return k_; }

 private:
  std::size_t k_;
};

// Clips each tap to +-limit in place; returns the number of taps clipped.
std::size_t clip_coefficients(std::span<double> taps, double limit);

SimulationResult simulate(const FirCoeffs& f, const RationalFilter& g,
                          const Signal& s, LoopController* controller,
                          const Safeguards& safeguards,
                          const SimulationOptions& options = {});

}  // namespace afclab

#endif  // AFCLAB_CLOSED_LOOP_HPP_
