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

// Experiment scenarios: synthetic feedback paths and inputs, the offline and
// recursive identification pipelines, and their metrics.

#ifndef AFCLAB_SCENARIO_HPP_
#define AFCLAB_SCENARIO_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "afclab/closed_loop.hpp"
#include "afclab/correlation.hpp"
#include "afclab/forward_paths.hpp"
#include "afclab/metrics.hpp"
#include "afclab/signals.hpp"

namespace afclab {

enum class LoopMode {
  kOffline,    // F0 = 0, batch least squares on sample averages
  kRecursive,  // RLS each sample, F0 <- F_hat after the warm-up
};

enum class InputKind { kArSynthetic, kWav };

std::string to_string(LoopMode mode);
LoopMode parse_loop_mode(const std::string& name);
std::string to_string(InputKind kind);
InputKind parse_input_kind(const std::string& name);

struct ScenarioConfig {
  double sample_rate = kDefaultSampleRate;
  double duration_s = 45.0;

  std::size_t feedback_length = 64;  // L_F = L_F_hat
  std::uint64_t feedback_seed = 1;
  double feedback_decay = 12.0;  // samples
  std::string feedback_file;     // overrides the synthetic path when set

  std::size_t ar_order = 10;     // L_D, taps of D(q)
  std::size_t model_order = 10;  // L_A, taps of A(q)

  ForwardPathSpec forward;
  double margin_db = 3.0;
  LoopMode mode = LoopMode::kOffline;

  InputKind input = InputKind::kArSynthetic;
  std::string wav_path;
  std::uint64_t input_seed = 1001;
  double input_rms = 0.03;
  std::optional<double> snr_db;
  std::uint64_t noise_seed = 2002;

  std::size_t grid_points = kDefaultGridPoints;
  std::optional<bool> remove_dc;  // default: off offline, on recursive
  Safeguards safeguards;
  CorrelationKernel kernel = CorrelationKernel::kLagged;

  std::size_t lb() const { return model_order + feedback_length - 1; }
  std::size_t n_samples() const;
  bool dc_removal() const;
  // Throws Error naming the violated constraint.
  void validate() const;
};

void to_json(nlohmann::json& j, const ScenarioConfig& cfg);
void from_json(const nlohmann::json& j, ScenarioConfig& cfg);

// Stable 64-bit hash of the canonical JSON form.
std::uint64_t config_hash(const ScenarioConfig& cfg);
std::string config_hash_hex(const ScenarioConfig& cfg);

// Decorrelated child seed for a named stream of a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// x_i exp(-i / decay) with x_i ~ N(0, 1), scaled so max |F(w)| = 1 on the
// default grid.
FirCoeffs make_feedback_path(std::size_t length, std::uint64_t seed,
                             double decay);

// Stable speech-like all-pole model with `taps` coefficients (taps - 1
// poles): resonant conjugate pairs spread over the band, plus a real
// low-pass pole when the pole count is odd.
ArModel make_ar_model(std::size_t taps, std::uint64_t seed);

struct ScenarioSignals {
  FirCoeffs feedback;
  Signal input;  // s[k], noise already mixed in
  std::optional<ArModel> ar_model;
};

ScenarioSignals make_scenario_signals(const ScenarioConfig& cfg);

struct ScenarioOutcome {
  MetricsReport report;
  FirCoeffs feedback;
  FirCoeffs estimate;
  RationalFilter forward;  // calibrated
  double forward_gain = 1.0;
  std::vector<double> a_bar;
  std::vector<double> b;
  SimulationTrace trace;
};

ScenarioOutcome run_scenario_detailed(const ScenarioConfig& cfg);
MetricsReport run_scenario(const ScenarioConfig& cfg);

// Conditioning report without solving.
struct ProbeReport {
  double kappa = 1.0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  std::size_t dim = 0;
  std::size_t forward_length = 0;       // L_GN
  std::size_t forward_den_length = 0;   // L_GD
  std::size_t forward_delay = 0;        // alpha
  bool delay_condition = false;         // alpha >= L_A
  bool invertibility_condition = false; // max(L_GN, L_GD - L_F + 1) > L_A
};

ProbeReport probe_scenario(const ScenarioConfig& cfg);

}  // namespace afclab

#endif  // AFCLAB_SCENARIO_HPP_
