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

#include <algorithm>
#include <cmath>
#include <string>

namespace afclab {
namespace {

// sum_i c[i] x[k - i] over the available history.
double dot_history(std::span<const double> c, const std::vector<double>& x,
                   std::size_t k) {
  const std::size_t n = std::min(c.size(), k + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += c[i] * x[k - i];
  return acc;
}

}  // namespace

SimulationError::SimulationError(std::size_t k, const std::string& what)
    : Error("simulation aborted at sample " + std::to_string(k) + ": " + what),
      k_(k) {}

std::size_t clip_coefficients(std::span<double> taps, double limit) {
  std::size_t clipped = 0;
  for (double& v : taps) {
    if (v > limit) {
      v = limit;
      ++clipped;
    } else if (v < -limit) {
      v = -limit;
      ++clipped;
    }
  }
  return clipped;
}

SimulationResult simulate(const FirCoeffs& f, const RationalFilter& g,
                          const Signal& s, LoopController* controller,
                          const Safeguards& safeguards,
                          const SimulationOptions& options) {
  const auto num = g.numerator().taps();
  const auto den = g.denominator().taps();
  if (num[0] != 0.0) {
    throw Error("simulate: forward path needs a delay of at least one sample");
  }

  std::vector<double> canceller =
      options.initial_canceller ? options.initial_canceller->vec()
                                : std::vector<double>(f.size(), 0.0);
  const std::size_t n = s.size();
  const auto warmup = static_cast<std::size_t>(
      std::ceil(safeguards.warmup_s * s.sample_rate));

  std::vector<double> m(n, 0.0);
  std::vector<double> l(n, 0.0);
  std::vector<double> u(n, 0.0);
  SimulationResult out;
  SimulationTrace& trace = out.trace;
  if (safeguards.clipping) {
    trace.coefficient_clip_events +=
        clip_coefficients(canceller, safeguards.coeff_clip);
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (options.snapshot_interval != 0 && k % options.snapshot_interval == 0) {
      trace.snapshots.push_back({k, canceller});
    }

    // 1. Loudspeaker from past canceller outputs and past loudspeaker samples.
    double lk = 0.0;
    const std::size_t nt = std::min(num.size(), k + 1);
    for (std::size_t i = 1; i < nt; ++i) lk += num[i] * u[k - i];
    const std::size_t dt = std::min(den.size(), k + 1);
    for (std::size_t j = 1; j < dt; ++j) lk -= den[j] * l[k - j];
    if (safeguards.clipping && std::abs(lk) > safeguards.amp_clip) {
      lk = std::copysign(safeguards.amp_clip, lk);
      ++trace.amplitude_clip_events;
    }
    if (!std::isfinite(lk)) throw SimulationError(k, "non-finite loudspeaker");
    l[k] = lk;

    // 2. Microphone.
    m[k] = dot_history(f.taps(), l, k) + s[k];
    if (!std::isfinite(m[k])) throw SimulationError(k, "non-finite microphone");

    // 3. Canceller output.
    u[k] = m[k] - dot_history(canceller, l, k);

    // 4. Adaptation.
    if (controller != nullptr) {
      controller->observe(k, std::span<const double>(m.data(), k + 1),
                          std::span<const double>(l.data(), k + 1));
      if (k + 1 >= warmup) {
        std::vector<double> next = controller->estimate();
        if (next.size() != canceller.size()) {
          throw SimulationError(k, "controller changed the canceller length");
        }
        if (safeguards.clipping) {
          trace.coefficient_clip_events +=
              clip_coefficients(next, safeguards.coeff_clip);
        }
        for (double v : next) {
          if (!std::isfinite(v)) throw SimulationError(k, "non-finite estimate");
        }
        canceller = std::move(next);
      }
    }
  }

  out.m = Signal(std::move(m), s.sample_rate);
  out.l = Signal(std::move(l), s.sample_rate);
  return out;
}

}  // namespace afclab
