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

#include "afclab/identifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace afclab {
namespace {

constexpr double kDefaultLoading = 1e-10;
// Beyond this the pre-loading solve is meaningless in double precision.
constexpr double kSingularKappa = 1e15;

}  // namespace

CorrelationSystem build_normal_equations(std::span<const double> m,
                                         std::span<const double> l,
                                         std::size_t la, std::size_t lb,
                                         CorrelationKernel kernel) {
  const RegressorLayout layout{la, lb};
  CorrelationSums sums = accumulate_correlation(m, l, layout, kernel);
  const double inv = 1.0 / static_cast<double>(sums.count);
  CorrelationSystem cs;
  cs.R = sums.s * inv;
  cs.r = sums.t * inv;
  cs.n_samples = sums.count;
  cs.layout = layout;
  return cs;
}

double condition_number(const Eigen::MatrixXd& R) {
  if (R.rows() != R.cols()) throw Error("condition_number: R must be square");
  if (R.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smax == 0.0) return std::numeric_limits<double>::infinity();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

BatchSolution solve_batch(const CorrelationSystem& cs,
                          std::optional<double> loading) {
  const Eigen::Index dim = cs.R.rows();
  if (cs.R.cols() != dim || cs.r.size() != dim) {
    throw Error("solve_batch: inconsistent system dimensions");
  }
  const auto la = static_cast<Eigen::Index>(cs.layout.la);
  if (la - 1 + static_cast<Eigen::Index>(cs.layout.lb) != dim) {
    throw Error("solve_batch: layout does not match R");
  }

  BatchSolution out;
  out.kappa = condition_number(cs.R);
  out.degenerate = !(out.kappa < kSingularKappa);
  out.loading = loading.value_or(kDefaultLoading * cs.R.trace() /
                                 static_cast<double>(dim));

  Eigen::MatrixXd loaded = cs.R;
  loaded.diagonal().array() += out.loading;
  Eigen::VectorXd x;
  Eigen::LLT<Eigen::MatrixXd> llt(loaded);
  if (llt.info() == Eigen::Success) {
    x = -llt.solve(cs.r);
  } else {
    out.degenerate = true;
    x = -loaded.completeOrthogonalDecomposition().solve(cs.r);
  }
  out.a_bar = x.head(la - 1);
  out.b = x.tail(dim - (la - 1));
  return out;
}

std::vector<double> monic(std::span<const double> a_bar) {
  std::vector<double> a(a_bar.size() + 1);
  a[0] = 1.0;
  std::copy(a_bar.begin(), a_bar.end(), a.begin() + 1);
  return a;
}

std::vector<double> long_division(std::span<const double> a,
                                  std::span<const double> b,
                                  std::size_t length, bool remove_dc) {
  std::vector<double> f(length, 0.0);
  for (std::size_t k = 0; k < length; ++k) {
    double acc = k < b.size() ? -b[k] : 0.0;
    const std::size_t nj = std::min(a.size(), k + 1);
    for (std::size_t j = 1; j < nj; ++j) acc -= a[j] * f[k - j];
    f[k] = acc;
  }
  if (remove_dc) {
    const double mean =
        std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(length);
    for (double& v : f) v -= mean;
  }
  return f;
}

FirCoeffs recover_feedback(std::span<const double> a, std::span<const double> b,
                           std::size_t length, bool remove_dc) {
  if (a.empty() || a[0] != 1.0) throw Error("recover_feedback: A(q) must be monic");
  if (length == 0) throw Error("recover_feedback: zero length");
  return FirCoeffs(long_division(a, b, length, remove_dc));
}

std::vector<double> prediction_errors(std::span<const double> m,
                                      std::span<const double> l,
                                      std::span<const double> a_bar,
                                      std::span<const double> b) {
  if (m.size() != l.size()) throw Error("prediction_errors: length mismatch");
  const RegressorLayout layout{a_bar.size() + 1, b.size()};
  std::vector<double> weights(a_bar.begin(), a_bar.end());
  weights.insert(weights.end(), b.begin(), b.end());
  std::vector<double> reg(layout.dim());
  std::vector<double> e(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    fill_regressor(m, l, k, layout, reg);
    double acc = m[k];
    for (std::size_t i = 0; i < reg.size(); ++i) acc += weights[i] * reg[i];
    e[k] = acc;
  }
  return e;
}

RlsState::RlsState(std::size_t dim, double delta, double lambda)
    : p_(Eigen::MatrixXd::Identity(dim, dim) / delta),
      w_(Eigen::VectorXd::Zero(dim)),
      pi_(dim),
      gain_(dim),
      lambda_(lambda) {
  if (!(delta > 0.0)) throw Error("RlsState: delta must be positive");
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error("RlsState: forgetting factor must lie in (0, 1]");
  }
}

bool RlsState::update(double m_k, std::span<const double> regressor) {
  const auto dim = w_.size();
  if (static_cast<Eigen::Index>(regressor.size()) != dim) {
    throw Error("RlsState::update: regressor dimension mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> x(regressor.data(), dim);
  pi_.noalias() = p_ * x;
  const double gamma = lambda_ + x.dot(pi_);
  // The regression target is -m[k], so the a-priori error is -(m + w.x).
  const double err = -m_k - w_.dot(x);
  if (!std::isfinite(gamma) || !std::isfinite(err) || gamma <= 0.0 ||
      !pi_.allFinite()) {
    ++rollbacks_;
    return false;
  }
  gain_.noalias() = pi_ / gamma;
  const double gmax = gain_.cwiseAbs().maxCoeff();
  const double pmax = pi_.cwiseAbs().maxCoeff();
  const double huge = 1e300;
  if (!(gmax * pmax < huge) || !(gmax * std::abs(err) < huge)) {
    ++rollbacks_;
    return false;
  }
  w_.noalias() += gain_ * err;
  p_.noalias() -= gain_ * pi_.transpose();
  if (lambda_ != 1.0) p_ /= lambda_;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = j + 1; i < dim; ++i) {
      const double avg = 0.5 * (p_(i, j) + p_(j, i));
      p_(i, j) = avg;
      p_(j, i) = avg;
    }
  }
  ++count_;
  return true;
}

RecursiveAfc::RecursiveAfc(RegressorLayout layout, std::size_t fhat_length,
                           double delta, bool remove_dc, double coeff_clip)
    : layout_(layout),
      fhat_length_(fhat_length),
      remove_dc_(remove_dc),
      coeff_clip_(coeff_clip),
      rls_(layout.dim(), delta, 1.0),
      regressor_(layout.dim()),
      last_(fhat_length, 0.0) {}

void RecursiveAfc::observe(std::size_t k, std::span<const double> m,
                           std::span<const double> l) {
  if (k < layout_.burn_in()) return;
  fill_regressor(m, l, k, layout_, regressor_);
  rls_.update(m[k], regressor_);
}

std::vector<double> RecursiveAfc::estimate() const {
  const Eigen::VectorXd& w = rls_.weights();
  const std::size_t na = layout_.la - 1;
  const std::vector<double> a =
      monic(std::span<const double>(w.data(), na));
  const std::span<const double> b(w.data() + na, layout_.lb);
  std::vector<double> f = long_division(a, b, fhat_length_, remove_dc_);
  // An unstable intermediate A(q) can overflow the division; keep the last
  // usable estimate in that case.
  for (double v : f) {
    if (!std::isfinite(v)) return last_;
  }
  clip_events_ += clip_coefficients(f, coeff_clip_);
  last_ = f;
  return f;
}

}  // namespace afclab
