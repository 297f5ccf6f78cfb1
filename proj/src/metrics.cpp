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

#include "afclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace afclab {
namespace {

using cd = std::complex<double>;

// sum_i c[i] e^{-j w i} by Horner's rule in e^{-j w}.
cd eval_poly(std::span<const double> c, double w) {
  const cd zinv = std::polar(1.0, -w);
  cd acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * zinv + c[i];
  return acc;
}

Spectrum loop_response(const RationalFilter& g, const FirCoeffs& f,
                       const FrequencyGrid& grid) {
  Spectrum gr = freq_response(g, grid);
  const Spectrum fr = freq_response(f, grid);
  for (std::size_t i = 0; i < gr.size(); ++i) gr[i] *= fr[i];
  return gr;
}

double to_db(double magnitude) { return 20.0 * std::log10(magnitude); }

}  // namespace

FrequencyGrid::FrequencyGrid(std::size_t n_points) : n_(n_points) {
  if (n_ < 64) throw Error("FrequencyGrid: at least 64 points required");
}

double FrequencyGrid::omega(std::size_t i) const {
  return std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_ - 1);
}

Spectrum freq_response(const FirCoeffs& f, const FrequencyGrid& grid) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid.size());
  Spectrum out(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] = eval_poly(f.taps(), grid.omega(idx));
  }
  return out;
}

Spectrum freq_response(const RationalFilter& g, const FrequencyGrid& grid) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid.size());
  Spectrum out(grid.size());
  const auto num = g.numerator().taps();
  const auto den = g.denominator().taps();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double w = grid.omega(idx);
    out[idx] = eval_poly(num, w) / eval_poly(den, w);
  }
  return out;
}

std::string flags_to_string(std::uint32_t flags) {
  static constexpr std::pair<Flag, const char*> kNames[] = {
      {kFlagEmptyCriticalSet, "empty_critical_set"},
      {kFlagAsgClamped, "asg_clamped"},
      {kFlagMisalignmentClamped, "misalignment_clamped"},
      {kFlagIllConditioned, "ill_conditioned"},
      {kFlagSingular, "singular"},
      {kFlagAmplitudeClipped, "amplitude_clipped"},
      {kFlagCoefficientClipped, "coefficient_clipped"},
      {kFlagRlsRollback, "rls_rollback"},
      {kFlagRunFailed, "run_failed"},
  };
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (flags & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out;
}

CriticalSet critical_frequencies(const Spectrum& loop) {
  CriticalSet set;
  const std::size_t n = loop.size();
  // Real filters are real at 0 and pi; rounding leaves ~1e-15 there at pi.
  auto imag_at = [&](std::size_t i) {
    return (i == 0 || i + 1 == n) ? 0.0 : loop[i].imag();
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double im = imag_at(i);
    const double re = loop[i].real();
    if (im == 0.0) {
      if (re > 0.0) set.crossings.push_back({i, 0.0});
      continue;
    }
    if (i + 1 == n) break;
    const double im_next = imag_at(i + 1);
    if (im_next == 0.0 || (im > 0.0) == (im_next > 0.0)) continue;
    const double t = im / (im - im_next);
    const double re_cross = re + t * (loop[i + 1].real() - re);
    // A sign change of the imaginary part with negative real part is the
    // +-pi wrap, not a 2*pi multiple.
    if (re_cross > 0.0) set.crossings.push_back({i, t});
  }
  return set;
}

double max_on_critical_set(const Spectrum& h, const CriticalSet& set) {
  double best = 0.0;
  if (set.empty()) {
    for (const auto& v : h) best = std::max(best, std::abs(v));
    return best;
  }
  for (const auto& c : set.crossings) {
    const double a = std::abs(h[c.index]);
    double mag = a;
    if (c.frac > 0.0) mag = a + c.frac * (std::abs(h[c.index + 1]) - a);
    best = std::max(best, mag);
  }
  return best;
}

GainResult msg_detail(const RationalFilter& g, const FirCoeffs& f,
                      const FrequencyGrid& grid) {
  const Spectrum loop = loop_response(g, f, grid);
  const CriticalSet set = critical_frequencies(loop);
  const double peak = max_on_critical_set(loop, set);
  if (!(peak > 0.0)) {
    // A zero peak on a non-empty set still means zero loop gain there; fall
    // back to the full grid before giving up.
    double any = max_on_critical_set(loop, CriticalSet{});
    if (!(any > 0.0)) throw Error("msg: loop response is identically zero");
  }
  GainResult out;
  out.flags = set.empty() ? kFlagEmptyCriticalSet : kFlagNone;
  out.db = -to_db(peak);
  return out;
}

double msg(const RationalFilter& g, const FirCoeffs& f,
           const FrequencyGrid& grid) {
  return msg_detail(g, f, grid).db;
}

GainResult asg_detail(const RationalFilter& g, const FirCoeffs& f,
                      const FirCoeffs& f_hat, const FrequencyGrid& grid) {
  const Spectrum gr = freq_response(g, grid);
  const Spectrum fr = freq_response(f, grid);
  const Spectrum fh = freq_response(f_hat, grid);
  Spectrum loop(gr.size());
  Spectrum residual(gr.size());
  for (std::size_t i = 0; i < gr.size(); ++i) {
    loop[i] = gr[i] * fr[i];
    residual[i] = gr[i] * (fr[i] - fh[i]);
  }
  const CriticalSet set = critical_frequencies(loop);
  const double peak = max_on_critical_set(loop, set);
  if (!(peak > 0.0) && !(max_on_critical_set(loop, CriticalSet{}) > 0.0)) {
    throw Error("asg: loop response is identically zero");
  }
  const double res = max_on_critical_set(residual, set);
  GainResult out;
  out.flags = set.empty() ? kFlagEmptyCriticalSet : kFlagNone;
  if (res < 1e-10) {
    out.db = kClampDb;
    out.flags |= kFlagAsgClamped;
    return out;
  }
  // MSG with canceller minus MSG without.
  out.db = -to_db(res) - (-to_db(peak));
  return out;
}

double asg(const RationalFilter& g, const FirCoeffs& f, const FirCoeffs& f_hat,
           const FrequencyGrid& grid) {
  return asg_detail(g, f, f_hat, grid).db;
}

double misalignment(const FirCoeffs& f, const FirCoeffs& f_hat) {
  const std::size_t n = std::max(f.size(), f_hat.size());
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < f.size() ? f[i] : 0.0;
    const double b = i < f_hat.size() ? f_hat[i] : 0.0;
    err += (a - b) * (a - b);
    ref += a * a;
  }
  if (!(ref > 0.0)) throw Error("misalignment: reference path has zero norm");
  if (err == 0.0) return -kClampDb;
  return std::max(-kClampDb, 10.0 * std::log10(err / ref));
}

}  // namespace afclab
