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

#include "afclab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "afclab/identifier.hpp"
#include "afclab/io.hpp"

namespace afclab {
namespace {

// Child-seed streams.
constexpr std::uint64_t kStreamArModel = 1;
constexpr std::uint64_t kStreamExcitation = 2;
constexpr std::uint64_t kStreamNoiseModel = 3;
constexpr std::uint64_t kStreamNoiseExcitation = 4;

constexpr double kRlsDeltaScale = 1e-4;

Signal scaled_to_rms(const Signal& x, double rms) {
  const double p = power(x.view());
  if (!(p > 0.0)) throw Error("input signal has zero power");
  const double c = rms / std::sqrt(p);
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = c * x[k];
  return Signal(std::move(out), x.sample_rate);
}

Signal synthetic_ar_input(std::size_t taps, std::uint64_t seed, std::size_t n,
                          double fs, ArModel* model_out) {
  ArModel model = make_ar_model(taps, derive_seed(seed, kStreamArModel));
  Signal w = white_noise(n, derive_seed(seed, kStreamExcitation), fs);
  Signal s = ar_generate(model, w);
  if (model_out != nullptr) *model_out = model;
  return s;
}

}  // namespace

std::string to_string(LoopMode mode) {
  return mode == LoopMode::kOffline ? "offline" : "recursive";
}

LoopMode parse_loop_mode(const std::string& name) {
  if (name == "offline") return LoopMode::kOffline;
  if (name == "recursive") return LoopMode::kRecursive;
  throw Error("unknown mode '" + name + "' (expected offline or recursive)");
}

std::string to_string(InputKind kind) {
  return kind == InputKind::kArSynthetic ? "ar_synthetic" : "wav";
}

InputKind parse_input_kind(const std::string& name) {
  if (name == "ar_synthetic" || name == "ar") return InputKind::kArSynthetic;
  if (name == "wav" || name == "wav_file") return InputKind::kWav;
  throw Error("unknown input '" + name + "' (expected ar_synthetic or wav)");
}

std::size_t ScenarioConfig::n_samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

bool ScenarioConfig::dc_removal() const {
  return remove_dc.value_or(mode == LoopMode::kRecursive);
}

void ScenarioConfig::validate() const {
  if (!(sample_rate > 0.0)) throw Error("config: sample_rate must be positive");
  if (!(duration_s > 0.0)) throw Error("config: duration must be positive");
  if (feedback_length < 1) throw Error("config: feedback_length must be >= 1");
  if (!(feedback_decay > 0.0)) throw Error("config: feedback_decay must be > 0");
  if (ar_order < 1) throw Error("config: ar_order must be >= 1");
  if (model_order < 1) throw Error("config: model_order must be >= 1");
  if (input == InputKind::kArSynthetic && model_order < ar_order) {
    throw Error("config: model_order (L_A) must be >= ar_order (L_D)");
  }
  if (forward.kind != ForwardPathKind::kDelay &&
      (forward.alpha < 1 || forward.alpha >= forward.length)) {
    throw Error("config: forward path needs 1 <= alpha < length");
  }
  if (forward.kind == ForwardPathKind::kDelay && forward.length < 2) {
    throw Error("config: delay forward path needs length >= 2");
  }
  if (input == InputKind::kWav && wav_path.empty()) {
    throw Error("config: wav input selected without wav_path");
  }
  if (!(input_rms > 0.0)) throw Error("config: input_rms must be positive");
  if (grid_points < 64) throw Error("config: grid_points must be >= 64");
  if (!(safeguards.coeff_clip > 0.0) || !(safeguards.amp_clip > 0.0) ||
      !(safeguards.warmup_s >= 0.0)) {
    throw Error("config: safeguards must be positive");
  }
  if (n_samples() <= std::max(model_order, lb())) {
    throw Error("config: duration too short for the model orders");
  }
}

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = nlohmann::json{
      {"sample_rate", c.sample_rate},
      {"duration_s", c.duration_s},
      {"feedback_length", c.feedback_length},
      {"feedback_seed", c.feedback_seed},
      {"feedback_decay", c.feedback_decay},
      {"feedback_file", c.feedback_file},
      {"ar_order", c.ar_order},
      {"model_order", c.model_order},
      {"forward_kind", to_string(c.forward.kind)},
      {"forward_length", c.forward.length},
      {"forward_alpha", c.forward.alpha},
      {"forward_seed", c.forward.seed},
      {"margin_db", c.margin_db},
      {"mode", to_string(c.mode)},
      {"input", to_string(c.input)},
      {"wav_path", c.wav_path},
      {"input_seed", c.input_seed},
      {"input_rms", c.input_rms},
      {"noise_seed", c.noise_seed},
      {"grid_points", c.grid_points},
      {"coeff_clip", c.safeguards.coeff_clip},
      {"amp_clip", c.safeguards.amp_clip},
      {"warmup_s", c.safeguards.warmup_s},
      {"clipping", c.safeguards.clipping},
      {"kernel", to_string(c.kernel)},
  };
  j["snr_db"] = c.snr_db ? nlohmann::json(*c.snr_db) : nlohmann::json(nullptr);
  j["remove_dc"] =
      c.remove_dc ? nlohmann::json(*c.remove_dc) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw Error("config: expected a JSON object");
  static const char* kKnown[] = {
      "sample_rate", "duration_s",    "feedback_length", "feedback_seed",
      "feedback_decay", "feedback_file", "ar_order",     "model_order",
      "forward_kind",  "forward_length", "forward_alpha", "forward_seed",
      "margin_db",     "mode",          "input",          "wav_path",
      "input_seed",    "input_rms",     "noise_seed",     "grid_points",
      "coeff_clip",    "amp_clip",      "warmup_s",       "clipping",
      "kernel",        "snr_db",        "remove_dc"};
  for (const auto& item : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) {
          return item.key() == k;
        }) == std::end(kKnown)) {
      throw Error("config: unknown key '" + item.key() + "'");
    }
  }
  try {
    c.sample_rate = j.value("sample_rate", c.sample_rate);
    c.duration_s = j.value("duration_s", c.duration_s);
    c.feedback_length = j.value("feedback_length", c.feedback_length);
    c.feedback_seed = j.value("feedback_seed", c.feedback_seed);
    c.feedback_decay = j.value("feedback_decay", c.feedback_decay);
    c.feedback_file = j.value("feedback_file", c.feedback_file);
    c.ar_order = j.value("ar_order", c.ar_order);
    c.model_order = j.value("model_order", c.model_order);
    if (j.contains("forward_kind")) {
      c.forward.kind = parse_forward_path_kind(j.at("forward_kind"));
    }
    c.forward.length = j.value("forward_length", c.forward.length);
    c.forward.alpha = j.value("forward_alpha", c.forward.alpha);
    c.forward.seed = j.value("forward_seed", c.forward.seed);
    c.margin_db = j.value("margin_db", c.margin_db);
    if (j.contains("mode")) c.mode = parse_loop_mode(j.at("mode"));
    if (j.contains("input")) c.input = parse_input_kind(j.at("input"));
    c.wav_path = j.value("wav_path", c.wav_path);
    c.input_seed = j.value("input_seed", c.input_seed);
    c.input_rms = j.value("input_rms", c.input_rms);
    c.noise_seed = j.value("noise_seed", c.noise_seed);
    c.grid_points = j.value("grid_points", c.grid_points);
    c.safeguards.coeff_clip = j.value("coeff_clip", c.safeguards.coeff_clip);
    c.safeguards.amp_clip = j.value("amp_clip", c.safeguards.amp_clip);
    c.safeguards.warmup_s = j.value("warmup_s", c.safeguards.warmup_s);
    c.safeguards.clipping = j.value("clipping", c.safeguards.clipping);
    if (j.contains("kernel")) {
      const std::string k = j.at("kernel");
      if (k == "reference") {
        c.kernel = CorrelationKernel::kReference;
      } else if (k == "parallel") {
        c.kernel = CorrelationKernel::kParallel;
      } else if (k == "lagged") {
        c.kernel = CorrelationKernel::kLagged;
      } else {
        throw Error("config: unknown kernel '" + k + "'");
      }
    }
    if (j.contains("snr_db")) {
      c.snr_db = j.at("snr_db").is_null()
                     ? std::nullopt
                     : std::optional<double>(j.at("snr_db").get<double>());
    }
    if (j.contains("remove_dc")) {
      c.remove_dc = j.at("remove_dc").is_null()
                        ? std::nullopt
                        : std::optional<bool>(j.at("remove_dc").get<bool>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string text = nlohmann::json(cfg).dump();
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash_hex(const ScenarioConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finaliser
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

FirCoeffs make_feedback_path(std::size_t length, std::uint64_t seed,
                             double decay) {
  if (length < 1) throw Error("make_feedback_path: length must be >= 1");
  if (!(decay > 0.0)) throw Error("make_feedback_path: decay must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> taps(length);
  for (std::size_t i = 0; i < length; ++i) {
    taps[i] = normal(rng) * std::exp(-static_cast<double>(i) / decay);
  }
  FirCoeffs raw(std::move(taps));
  const Spectrum h = freq_response(raw, FrequencyGrid());
  double peak = 0.0;
  for (const auto& v : h) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw Error("make_feedback_path: degenerate path");
  return raw.scaled(1.0 / peak);
}

ArModel make_ar_model(std::size_t taps, std::uint64_t seed) {
  if (taps < 1) throw Error("make_ar_model: need at least one tap");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t poles = taps - 1;
  const std::size_t pairs = poles / 2;
  std::vector<double> d{1.0};
  auto multiply = [&d](const std::vector<double>& factor) {
    std::vector<double> out(d.size() + factor.size() - 1, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < factor.size(); ++j) out[i + j] += d[i] * factor[j];
    }
    d = std::move(out);
  };
  for (std::size_t p = 0; p < pairs; ++p) {
    // One resonance per band slot, jittered inside the slot.
    const double slot = (static_cast<double>(p) + 0.2 + 0.6 * unit(rng)) /
                        static_cast<double>(pairs);
    const double theta = std::numbers::pi * slot;
    const double radius = 0.75 + 0.17 * unit(rng);
    multiply({1.0, -2.0 * radius * std::cos(theta), radius * radius});
  }
  if (poles % 2 == 1) {
    const double radius = 0.5 + 0.35 * unit(rng);
    multiply({1.0, -radius});
  }
  return ArModel(FirCoeffs(std::move(d)));
}

ScenarioSignals make_scenario_signals(const ScenarioConfig& cfg) {
  std::optional<FirCoeffs> feedback;
  if (!cfg.feedback_file.empty()) {
    std::vector<double> taps = read_coefficients(cfg.feedback_file);
    if (taps.size() > cfg.feedback_length) {
      throw Error("feedback file has " + std::to_string(taps.size()) +
                  " taps, more than feedback_length " +
                  std::to_string(cfg.feedback_length));
    }
    taps.resize(cfg.feedback_length, 0.0);
    feedback = FirCoeffs(std::move(taps));
  } else {
    feedback = make_feedback_path(cfg.feedback_length, cfg.feedback_seed,
                                  cfg.feedback_decay);
  }

  const std::size_t n = cfg.n_samples();
  std::optional<ArModel> model;
  Signal s;
  if (cfg.input == InputKind::kArSynthetic) {
    ArModel m(FirCoeffs{1.0});
    s = synthetic_ar_input(cfg.ar_order, cfg.input_seed, n, cfg.sample_rate, &m);
    model = m;
  } else {
    Signal speech = load_wav(cfg.wav_path);
    if (speech.sample_rate != cfg.sample_rate) {
      throw Error("wav sample rate does not match the configured sample rate");
    }
    if (speech.size() > n) speech.samples.resize(n);
    s = speech;
  }
  s = scaled_to_rms(s, cfg.input_rms);

  if (cfg.snr_db) {
    // Babble surrogate: an independently drawn AR process of the same order.
    const std::size_t taps = std::max<std::size_t>(cfg.ar_order, 2);
    const ArModel noise_model =
        make_ar_model(taps, derive_seed(cfg.noise_seed, kStreamNoiseModel));
    const Signal v = ar_generate(
        noise_model, white_noise(s.size(),
                                 derive_seed(cfg.noise_seed, kStreamNoiseExcitation),
                                 s.sample_rate));
    s = scaled_to_rms(mix_at_snr(s, v, *cfg.snr_db), cfg.input_rms);
  }
  return ScenarioSignals{std::move(*feedback), std::move(s), model};
}

ScenarioOutcome run_scenario_detailed(const ScenarioConfig& cfg) {
  cfg.validate();
  const ScenarioSignals sig = make_scenario_signals(cfg);
  const FrequencyGrid grid(cfg.grid_points);
  const RationalFilter g_unit = make_forward_path(cfg.forward);
  const double gain = calibrate_gain(g_unit, sig.feedback, cfg.margin_db, grid);
  const RationalFilter g = g_unit.scaled(gain);

  const RegressorLayout layout{cfg.model_order, cfg.lb()};
  std::uint32_t flags = kFlagNone;

  std::optional<RecursiveAfc> controller;
  if (cfg.mode == LoopMode::kRecursive) {
    const double delta = kRlsDeltaScale * power(sig.input.view());
    controller.emplace(layout, cfg.feedback_length, delta, cfg.dc_removal(),
                       cfg.safeguards.coeff_clip);
  }
  SimulationResult sim;
  try {
    sim = simulate(sig.feedback, g, sig.input,
                   controller ? &*controller : nullptr, cfg.safeguards);
  } catch (const SimulationError& e) {
    throw Error(std::string(e.what()) + " (config " + config_hash_hex(cfg) + ")");
  }
  if (sim.trace.amplitude_clip_events > 0) flags |= kFlagAmplitudeClipped;
  if (sim.trace.coefficient_clip_events > 0) flags |= kFlagCoefficientClipped;

  const CorrelationSystem cs = build_normal_equations(
      sim.m.view(), sim.l.view(), layout.la, layout.lb, cfg.kernel);

  std::vector<double> a_bar;
  std::vector<double> b;
  std::vector<double> estimate;
  double kappa = 0.0;
  if (cfg.mode == LoopMode::kOffline) {
    const BatchSolution sol = solve_batch(cs);
    kappa = sol.kappa;
    if (sol.degenerate) flags |= kFlagSingular;
    a_bar.assign(sol.a_bar.data(), sol.a_bar.data() + sol.a_bar.size());
    b.assign(sol.b.data(), sol.b.data() + sol.b.size());
    estimate = long_division(monic(a_bar), b, cfg.feedback_length,
                             cfg.dc_removal());
    for (double& v : estimate) {
      if (!std::isfinite(v)) {
        v = 0.0;
        flags |= kFlagSingular;
      }
    }
    if (cfg.safeguards.clipping &&
        clip_coefficients(estimate, cfg.safeguards.coeff_clip) > 0) {
      flags |= kFlagCoefficientClipped;
    }
  } else {
    kappa = condition_number(cs.R);
    const Eigen::VectorXd& w = controller->rls().weights();
    a_bar.assign(w.data(), w.data() + (layout.la - 1));
    b.assign(w.data() + (layout.la - 1), w.data() + w.size());
    estimate = controller->estimate();
    if (controller->rls().rollbacks() > 0) flags |= kFlagRlsRollback;
    if (controller->coefficient_clip_events() > 0) {
      flags |= kFlagCoefficientClipped;
    }
  }
  if (!(kappa < kIllConditionedKappa)) flags |= kFlagIllConditioned;

  FirCoeffs f_hat(std::move(estimate));
  const GainResult msg_r = msg_detail(g, sig.feedback, grid);
  const GainResult asg_r = asg_detail(g, sig.feedback, f_hat, grid);
  const double mis = misalignment(sig.feedback, f_hat);
  flags |= msg_r.flags | asg_r.flags;
  if (mis <= -kClampDb) flags |= kFlagMisalignmentClamped;

  ScenarioOutcome out{
      MetricsReport{msg_r.db, asg_r.db, kappa, mis, flags},
      sig.feedback,
      f_hat,
      g,
      gain,
      std::move(a_bar),
      std::move(b),
      std::move(sim.trace),
  };
  return out;
}

MetricsReport run_scenario(const ScenarioConfig& cfg) {
  return run_scenario_detailed(cfg).report;
}

ProbeReport probe_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const ScenarioSignals sig = make_scenario_signals(cfg);
  const FrequencyGrid grid(cfg.grid_points);
  const RationalFilter g_unit = make_forward_path(cfg.forward);
  const double gain = calibrate_gain(g_unit, sig.feedback, cfg.margin_db, grid);
  const RationalFilter g = g_unit.scaled(gain);
  const SimulationResult sim =
      simulate(sig.feedback, g, sig.input, nullptr, cfg.safeguards);
  const CorrelationSystem cs = build_normal_equations(
      sim.m.view(), sim.l.view(), cfg.model_order, cfg.lb(), cfg.kernel);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cs.R);
  const auto& sv = svd.singularValues();
  ProbeReport p;
  p.sigma_max = sv(0);
  p.sigma_min = sv(sv.size() - 1);
  p.kappa = condition_number(cs.R);
  p.dim = static_cast<std::size_t>(cs.R.rows());
  p.forward_length = g.numerator().size();
  p.forward_den_length = g.denominator().size();
  p.forward_delay = leading_delay(g);
  p.delay_condition = p.forward_delay >= cfg.model_order;
  const long den_term = static_cast<long>(p.forward_den_length) -
                        static_cast<long>(cfg.feedback_length) + 1;
  p.invertibility_condition =
      std::max(static_cast<long>(p.forward_length), den_term) >
      static_cast<long>(cfg.model_order);
  return p;
}

}  // namespace afclab
