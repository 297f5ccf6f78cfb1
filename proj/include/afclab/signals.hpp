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

// Sampled signals, FIR/IIR filters and the AR input model.
//
// All filters run from zero initial state: samples before k = 0 are taken
// to be zero.

#ifndef AFCLAB_SIGNALS_HPP_
#define AFCLAB_SIGNALS_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace afclab {

inline constexpr double kDefaultSampleRate = 16000.0;

// Raised on violated preconditions and degenerate inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Signal {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;

  Signal() = default;
  explicit Signal(std::vector<double> x, double fs = kDefaultSampleRate);

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double operator[](std::size_t k) const { return samples[k]; }
  std::span<const double> view() const { return samples; }
};

// Non-empty vector of finite taps; index 0 is the zero-lag coefficient.
class FirCoeffs {
 public:
  explicit FirCoeffs(std::vector<double> taps);
  FirCoeffs(std::initializer_list<double> taps);

  std::size_t size() const { return taps_.size(); }
  double operator[](std::size_t i) const { return taps_[i]; }
  std::span<const double> taps() const { return taps_; }
  const std::vector<double>& vec() const { return taps_; }

  // Zero-pads to `n` taps (n >= size()).
  FirCoeffs padded(std::size_t n) const;
  FirCoeffs scaled(double c) const;

  friend bool operator==(const FirCoeffs&, const FirCoeffs&) = default;

 private:
  std::vector<double> taps_;
};

// num(q) / den(q) with den[0] = 1 and all poles strictly inside the unit
// circle. Construction rejects anything else.
class RationalFilter {
 public:
  RationalFilter(FirCoeffs numerator, FirCoeffs denominator);
  explicit RationalFilter(FirCoeffs numerator);

  const FirCoeffs& numerator() const { return num_; }
  const FirCoeffs& denominator() const { return den_; }
  bool is_fir() const { return den_.size() == 1; }

  // Gain applied to the numerator only; the denominator stays monic.
  RationalFilter scaled(double gain) const;

 private:
  FirCoeffs num_;
  FirCoeffs den_;
};

// Monic all-pole model H(q) = 1 / D(q).
class ArModel {
 public:
  explicit ArModel(FirCoeffs d);

  const FirCoeffs& d() const { return d_; }
  std::size_t size() const { return d_.size(); }

 private:
  FirCoeffs d_;
};

// Magnitude of the largest root of sum_i c[i] z^{-i}, i.e. the largest pole
// radius when `c` is used as a denominator. Zero for a single tap.
double max_root_radius(std::span<const double> c);

// Full linear convolution, length |a| + |b| - 1.
FirCoeffs convolve(const FirCoeffs& a, const FirCoeffs& b);

Signal fir_filter(const FirCoeffs& f, const Signal& x);
Signal iir_filter(const RationalFilter& g, const Signal& x);

// n i.i.d. standard-normal samples, reproducible for a given seed.
Signal white_noise(std::size_t n, std::uint64_t seed,
                   double fs = kDefaultSampleRate);

// s[k] = w[k] - sum_{j>=1} d[j] s[k-j].
Signal ar_generate(const ArModel& model, const Signal& w);

struct LevinsonResult {
  std::vector<double> coefficients;  // monic, length order + 1
  std::vector<double> reflection;    // length order
  double prediction_error = 0.0;
};

// Solves the Yule-Walker equations for autocorrelation lags r[0..order].
LevinsonResult levinson_durbin(std::span<const double> r, std::size_t order);

// Biased autocorrelation r[j] = (1/N) sum_k x[k] x[k-j], j = 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> x,
                                    std::size_t max_lag);

// Autocorrelation-method linear prediction. Returns a monic predictor with
// order + 1 taps; throws Error on zero-energy input.
ArModel lpc(const Signal& x, std::size_t order);

// Mean square over the full signal.
double power(std::span<const double> x);

// Returns s + c*v with 10 log10(P_s / P_{c v}) = snr_db.
Signal mix_at_snr(const Signal& s, const Signal& v, double snr_db);

// Scale factor c used by mix_at_snr.
double snr_scale(const Signal& s, const Signal& v, double snr_db);

}  // namespace afclab

#endif  // AFCLAB_SIGNALS_HPP_
