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

// afclab command line: run, sweep, probe and gen.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "afclab/forward_paths.hpp"
#include "afclab/identifier.hpp"
#include "afclab/io.hpp"
#include "afclab/scenario.hpp"
#include "afclab/sweep.hpp"

namespace {

using afclab::Error;
using afclab::ScenarioConfig;

// Flag values that override the config file when given.
struct Overrides {
  std::string config_path;
  std::optional<double> sample_rate, duration, feedback_decay, margin, input_rms,
      snr, coeff_clip, amp_clip, warmup;
  std::optional<std::size_t> lf, ld, la, lgn, alpha, grid;
  std::optional<std::uint64_t> seed, forward_seed, input_seed, noise_seed;
  std::optional<std::string> feedback_file, forward, mode, wav, kernel;
  bool remove_dc = false, keep_dc = false, no_clipping = false;
};

void add_scenario_options(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON scenario file")
      ->check(CLI::ExistingFile);
  app->add_option("--fs", o.sample_rate, "sample rate [Hz]");
  app->add_option("--duration", o.duration, "signal length [s]");
  app->add_option("--lf", o.lf, "feedback path length L_F");
  app->add_option("--seed", o.seed, "feedback path seed");
  app->add_option("--feedback-decay", o.feedback_decay, "tap decay constant [samples]");
  app->add_option("--feedback-file", o.feedback_file, "feedback path coefficient file");
  app->add_option("--ld", o.ld, "AR input taps L_D");
  app->add_option("--la", o.la, "model taps L_A");
  app->add_option("--forward", o.forward, "forward path kind: fir, iir_ap, delay");
  app->add_option("--lgn", o.lgn, "forward path numerator length L_GN");
  app->add_option("--alpha", o.alpha, "forward path delay");
  app->add_option("--forward-seed", o.forward_seed, "forward path seed");
  app->add_option("--margin", o.margin, "gain margin below MSG [dB]");
  app->add_option("--mode", o.mode, "offline or recursive");
  app->add_option("--wav", o.wav, "mono 16-bit 16 kHz input file");
  app->add_option("--input-seed", o.input_seed, "AR input seed");
  app->add_option("--input-rms", o.input_rms, "input RMS level");
  app->add_option("--snr", o.snr, "input SNR against AR babble [dB]");
  app->add_option("--noise-seed", o.noise_seed, "babble seed");
  app->add_option("--grid", o.grid, "frequency grid points");
  app->add_flag("--remove-dc", o.remove_dc, "remove DC from the estimate");
  app->add_flag("--keep-dc", o.keep_dc, "keep DC in the estimate");
  app->add_flag("--no-clipping", o.no_clipping, "disable amplitude and coefficient clipping");
  app->add_option("--coeff-clip", o.coeff_clip, "coefficient clip level");
  app->add_option("--amp-clip", o.amp_clip, "loudspeaker clip level");
  app->add_option("--warmup", o.warmup, "recursive warm-up [s]");
  app->add_option("--kernel", o.kernel, "correlation kernel: reference, parallel, lagged");
}

afclab::CorrelationKernel parse_kernel(const std::string& name) {
  using afclab::CorrelationKernel;
  for (auto k : {CorrelationKernel::kReference, CorrelationKernel::kParallel,
                 CorrelationKernel::kLagged}) {
    if (afclab::to_string(k) == name) return k;
  }
  throw Error("unknown kernel '" + name + "'");
}

// Sweeps validate per row, after the axis value is applied.
ScenarioConfig resolve(const Overrides& o, bool validate = true) {
  ScenarioConfig c = o.config_path.empty() ? ScenarioConfig{}
                                           : afclab::read_config(o.config_path);
  if (o.sample_rate) c.sample_rate = *o.sample_rate;
  if (o.duration) c.duration_s = *o.duration;
  if (o.lf) c.feedback_length = *o.lf;
  if (o.seed) c.feedback_seed = *o.seed;
  if (o.feedback_decay) c.feedback_decay = *o.feedback_decay;
  if (o.feedback_file) c.feedback_file = *o.feedback_file;
  if (o.ld) c.ar_order = *o.ld;
  if (o.la) c.model_order = *o.la;
  if (o.forward) c.forward.kind = afclab::parse_forward_path_kind(*o.forward);
  if (o.lgn) c.forward.length = *o.lgn;
  if (o.alpha) c.forward.alpha = *o.alpha;
  if (o.forward_seed) c.forward.seed = *o.forward_seed;
  if (o.margin) c.margin_db = *o.margin;
  if (o.mode) c.mode = afclab::parse_loop_mode(*o.mode);
  if (o.wav) {
    c.input = afclab::InputKind::kWav;
    c.wav_path = *o.wav;
  }
  if (o.input_seed) c.input_seed = *o.input_seed;
  if (o.input_rms) c.input_rms = *o.input_rms;
  if (o.snr) c.snr_db = *o.snr;
  if (o.noise_seed) c.noise_seed = *o.noise_seed;
  if (o.grid) c.grid_points = *o.grid;
  if (o.remove_dc && o.keep_dc) throw Error("--remove-dc and --keep-dc conflict");
  if (o.remove_dc) c.remove_dc = true;
  if (o.keep_dc) c.remove_dc = false;
  if (o.no_clipping) c.safeguards.clipping = false;
  if (o.coeff_clip) c.safeguards.coeff_clip = *o.coeff_clip;
  if (o.amp_clip) c.safeguards.amp_clip = *o.amp_clip;
  if (o.warmup) c.safeguards.warmup_s = *o.warmup;
  if (o.kernel) c.kernel = parse_kernel(*o.kernel);
  if (validate) c.validate();
  return c;
}

// "2:30", "0:20:5" (inclusive, with step) or "-5,0,5".
std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() < 2 || parts.size() > 3) throw Error("bad range '" + text + "'");
    const double step = parts.size() == 3 ? parts[2] : 1.0;
    if (!(step > 0)) throw Error("range step must be positive");
    for (double v = parts[0]; v <= parts[1] + 1e-9 * step; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path);
  f << text;
}

int cmd_run(const Overrides& o, const std::string& out_path,
            const std::string& estimate_path) {
  const ScenarioConfig cfg = resolve(o);
  const afclab::ScenarioOutcome res = afclab::run_scenario_detailed(cfg);
  afclab::SweepRow row;
  row.axis_value = static_cast<double>(cfg.forward.length);
  row.seed = cfg.feedback_seed;
  row.report = res.report;
  std::ostringstream csv;
  afclab::write_rows_csv(csv, {row},
                         "afclab run mode=" + afclab::to_string(cfg.mode) +
                             " config_hash=" + afclab::config_hash_hex(cfg));
  emit(out_path, csv.str());
  if (!estimate_path.empty()) {
    afclab::write_coefficients(estimate_path, res.estimate.vec());
  }
  return 0;
}

int cmd_sweep(const Overrides& o, const std::string& axis_name,
              const std::string& values_text, const std::string& seeds_text,
              const std::string& out_path, const std::string& summary_path) {
  const ScenarioConfig cfg = resolve(o, false);
  const afclab::SweepAxis axis = afclab::parse_sweep_axis(axis_name);
  std::vector<std::uint64_t> seeds;
  for (double s : parse_values(seeds_text)) {
    if (s < 0) throw Error("seeds must be non-negative");
    seeds.push_back(static_cast<std::uint64_t>(s));
  }
  const afclab::SweepResult res =
      afclab::sweep(cfg, axis, parse_values(values_text), seeds);
  std::ostringstream csv;
  afclab::write_sweep_csv(csv, res);
  emit(out_path, csv.str());
  if (!summary_path.empty()) {
    std::ostringstream sum;
    afclab::write_summary_csv(sum, res);
    emit(summary_path, sum.str());
  }
  int failed = 0;
  for (const auto& row : res.rows) {
    if (!row.error.empty()) {
      std::cerr << "value " << row.axis_value << " seed " << row.seed << ": "
                << row.error << '\n';
      ++failed;
    }
  }
  return failed == 0 ? 0 : 2;
}

int cmd_probe(const Overrides& o) {
  const ScenarioConfig cfg = resolve(o);
  const afclab::ProbeReport p = afclab::probe_scenario(cfg);
  std::printf("config_hash %s\n", afclab::config_hash_hex(cfg).c_str());
  std::printf("dim %zu\n", p.dim);
  std::printf("kappa %.6g\n", p.kappa);
  std::printf("sigma_max %.6g\n", p.sigma_max);
  std::printf("sigma_min %.6g\n", p.sigma_min);
  std::printf("L_GN %zu\nL_GD %zu\nalpha %zu\n", p.forward_length,
              p.forward_den_length, p.forward_delay);
  std::printf("delay_condition %s\n", p.delay_condition ? "yes" : "no");
  std::printf("invertibility_condition %s\n",
              p.invertibility_condition ? "yes" : "no");
  std::printf("ill_conditioned %s\n",
              p.kappa >= afclab::kIllConditionedKappa ? "yes" : "no");
  return 0;
}

int cmd_gen(const Overrides& o, const std::string& what, const std::string& out_path,
            const std::string& den_path) {
  const ScenarioConfig cfg = resolve(o);
  if (out_path.empty()) throw Error("gen needs --out");
  if (what == "feedback") {
    afclab::write_coefficients(
        out_path, afclab::make_feedback_path(cfg.feedback_length, cfg.feedback_seed,
                                             cfg.feedback_decay)
                      .vec());
  } else if (what == "ar") {
    afclab::write_coefficients(
        out_path, afclab::make_ar_model(cfg.ar_order, cfg.input_seed).d().vec());
  } else if (what == "forward") {
    const afclab::RationalFilter g = afclab::make_forward_path(cfg.forward);
    afclab::write_coefficients(out_path, g.numerator().vec());
    if (!den_path.empty()) afclab::write_coefficients(den_path, g.denominator().vec());
  } else {
    throw Error("gen: unknown target '" + what + "' (feedback, ar, forward)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"afclab: two-channel adaptive feedback cancellation experiments"};
  app.require_subcommand(1);

  Overrides run_o, sweep_o, probe_o, gen_o;
  std::string run_out, run_estimate;
  auto* run = app.add_subcommand("run", "run one scenario and print a CSV row");
  add_scenario_options(run, run_o);
  run->add_option("--out", run_out, "CSV output (default stdout)");
  run->add_option("--estimate", run_estimate, "write the final feedback estimate");

  std::string axis, values, seeds = "1,2,3", sweep_out, summary_out;
  auto* sw = app.add_subcommand("sweep", "sweep one axis over seeds");
  add_scenario_options(sw, sweep_o);
  sw->add_option("--axis", axis, "length, alpha or snr_db")->required();
  sw->add_option("--values", values, "list a,b,c or range lo:hi[:step]");
  sw->add_option("--seeds", seeds, "feedback path seeds")->capture_default_str();
  sw->add_option("--out", sweep_out, "per-run CSV (default stdout)");
  sw->add_option("--summary", summary_out, "mean/std CSV per axis value");

  auto* probe = app.add_subcommand("probe", "report the conditioning of R only");
  add_scenario_options(probe, probe_o);

  std::string gen_what, gen_out, gen_den;
  auto* gen = app.add_subcommand("gen", "write synthetic coefficients to a file");
  add_scenario_options(gen, gen_o);
  gen->add_option("what", gen_what, "feedback, ar or forward")->required();
  gen->add_option("--out", gen_out, "coefficient file (numerator for forward)")
      ->required();
  gen->add_option("--den-out", gen_den, "forward path denominator file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_o, run_out, run_estimate);
    if (*sw) return cmd_sweep(sweep_o, axis, values, seeds, sweep_out, summary_out);
    if (*probe) return cmd_probe(probe_o);
    if (*gen) return cmd_gen(gen_o, gen_what, gen_out, gen_den);
  } catch (const std::exception& e) {
    std::cerr << "afclab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
