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

#include "afclab/signals.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace afclab {
namespace {

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(std::string(what) + ": non-finite value");
  }
}

}  // namespace

Signal::Signal(std::vector<double> x, double fs)
    : samples(std::move(x)), sample_rate(fs) {
  if (!(sample_rate > 0.0)) throw Error("Signal: sample rate must be positive");
  require_finite(samples, "Signal");
}

FirCoeffs::FirCoeffs(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) throw Error("FirCoeffs: empty tap vector");
  require_finite(taps_, "FirCoeffs");
}

FirCoeffs::FirCoeffs(std::initializer_list<double> taps)
    : FirCoeffs(std::vector<double>(taps)) {}

FirCoeffs FirCoeffs::padded(std::size_t n) const {
  if (n < taps_.size()) throw Error("FirCoeffs::padded: cannot truncate");
  std::vector<double> out = taps_;
  out.resize(n, 0.0);
  return FirCoeffs(std::move(out));
}

FirCoeffs FirCoeffs::scaled(double c) const {
  std::vector<double> out = taps_;
  for (double& v : out) v *= c;
  return FirCoeffs(std::move(out));
}

double max_root_radius(std::span<const double> c) {
  std::size_t n = c.size();
  while (n > 1 && c[n - 1] == 0.0) --n;
  if (n <= 1) return 0.0;
  if (c[0] == 0.0) throw Error("max_root_radius: leading coefficient is zero");
  const Eigen::Index order = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
  for (Eigen::Index j = 0; j < order; ++j) {
    companion(0, j) = -c[static_cast<std::size_t>(j) + 1] / c[0];
  }
  for (Eigen::Index i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

RationalFilter::RationalFilter(FirCoeffs numerator, FirCoeffs denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_[0] != 1.0) throw Error("RationalFilter: denominator must be monic");
  if (max_root_radius(den_.taps()) >= 1.0) {
    throw Error("RationalFilter: unstable denominator");
  }
}

RationalFilter::RationalFilter(FirCoeffs numerator)
    : RationalFilter(std::move(numerator), FirCoeffs{1.0}) {}

RationalFilter RationalFilter::scaled(double gain) const {
  return RationalFilter(num_.scaled(gain), den_);
}

ArModel::ArModel(FirCoeffs d) : d_(std::move(d)) {
  if (d_[0] != 1.0) throw Error("ArModel: d[0] must be 1");
  if (max_root_radius(d_.taps()) >= 1.0) throw Error("ArModel: unstable 1/D(q)");
}

FirCoeffs convolve(const FirCoeffs& a, const FirCoeffs& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return FirCoeffs(std::move(out));
}

Signal fir_filter(const FirCoeffs& f, const Signal& x) {
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t taps = std::min(f.size(), k + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < taps; ++i) acc += f[i] * x[k - i];
    y[k] = acc;
  }
  return Signal(std::move(y), x.sample_rate);
}

Signal iir_filter(const RationalFilter& g, const Signal& x) {
  const FirCoeffs& num = g.numerator();
  const FirCoeffs& den = g.denominator();
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t nt = std::min(num.size(), k + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < nt; ++i) acc += num[i] * x[k - i];
    const std::size_t dt = std::min(den.size(), k + 1);
    for (std::size_t j = 1; j < dt; ++j) acc -= den[j] * y[k - j];
    y[k] = acc;
  }
  return Signal(std::move(y), x.sample_rate);
}

Signal white_noise(std::size_t n, std::uint64_t seed, double fs) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(n);
  for (double& v : w) v = normal(rng);
  return Signal(std::move(w), fs);
}

Signal ar_generate(const ArModel& model, const Signal& w) {
  return iir_filter(RationalFilter(FirCoeffs{1.0}, model.d()), w);
}

std::vector<double> autocorrelation(std::span<const double> x,
                                    std::size_t max_lag) {
  std::vector<double> r(max_lag + 1, 0.0);
  const std::size_t n = x.size();
  if (n == 0) return r;
  for (std::size_t j = 0; j <= max_lag && j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = j; k < n; ++k) acc += x[k] * x[k - j];
    r[j] = acc / static_cast<double>(n);
  }
  return r;
}

LevinsonResult levinson_durbin(std::span<const double> r, std::size_t order) {
  if (r.size() < order + 1) throw Error("levinson_durbin: too few lags");
  if (!(r[0] > 0.0)) throw Error("levinson_durbin: zero-energy input");
  LevinsonResult out;
  out.coefficients.assign(order + 1, 0.0);
  out.coefficients[0] = 1.0;
  out.reflection.reserve(order);
  double err = r[0];
  std::vector<double> prev;
  for (std::size_t i = 1; i <= order; ++i) {
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc += out.coefficients[j] * r[i - j];
    const double k = -acc / err;
    prev = out.coefficients;
    for (std::size_t j = 1; j < i; ++j) {
      out.coefficients[j] = prev[j] + k * prev[i - j];
    }
    out.coefficients[i] = k;
    out.reflection.push_back(k);
    err *= (1.0 - k * k);
  }
  out.prediction_error = err;
  return out;
}

ArModel lpc(const Signal& x, std::size_t order) {
  if (x.size() <= order) throw Error("lpc: signal shorter than model order");
  const auto r = autocorrelation(x.view(), order);
  if (!(r[0] > 0.0)) throw Error("lpc: zero-energy input");
  auto result = levinson_durbin(r, order);
  return ArModel(FirCoeffs(std::move(result.coefficients)));
}

double power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double snr_scale(const Signal& s, const Signal& v, double snr_db) {
  if (s.size() != v.size()) throw Error("mix_at_snr: length mismatch");
  const double pv = power(v.view());
  if (!(pv > 0.0)) throw Error("mix_at_snr: noise has zero power");
  const double ps = power(s.view());
  return std::sqrt(ps / (pv * std::pow(10.0, snr_db / 10.0)));
}

Signal mix_at_snr(const Signal& s, const Signal& v, double snr_db) {
  const double c = snr_scale(s, v, snr_db);
  std::vector<double> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = s[k] + c * v[k];
  return Signal(std::move(out), s.sample_rate);
}

}  // namespace afclab
