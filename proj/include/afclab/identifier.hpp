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

// Two-channel adaptive feedback canceller (2ch-AFC).
//
// The prediction error
//
//   e[k] = m[k] + a_bar . [m[k-1] .. m[k-L_A+1]] + b . [l[k] .. l[k-L_B+1]]
//
// is linear in (a_bar, b), so minimising its mean square is a least-squares
// problem R [a_bar; b] = -r. The feedback path follows from
// F_hat(q) = -B(q) / A(q) with A(q) = 1 + q^-1 A_bar(q).

#ifndef AFCLAB_IDENTIFIER_HPP_
#define AFCLAB_IDENTIFIER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "afclab/closed_loop.hpp"
#include "afclab/correlation.hpp"
#include "afclab/signals.hpp"

namespace afclab {

// Sample-average correlation matrix R and vector r.
struct CorrelationSystem {
  Eigen::MatrixXd R;
  Eigen::VectorXd r;
  std::size_t n_samples = 0;
  RegressorLayout layout;
};

CorrelationSystem build_normal_equations(
    std::span<const double> m, std::span<const double> l, std::size_t la,
    std::size_t lb, CorrelationKernel kernel = CorrelationKernel::kLagged);

// sigma_max / sigma_min from a full SVD; +inf when sigma_min is zero.
double condition_number(const Eigen::MatrixXd& R);

// Condition numbers above this are reported as ill-conditioned.
inline constexpr double kIllConditionedKappa = 1e8;

struct BatchSolution {
  Eigen::VectorXd a_bar;  // L_A - 1
  Eigen::VectorXd b;      // L_B
  double kappa = 1.0;     // of R before loading
  double loading = 0.0;
  bool degenerate = false;  // R numerically singular
};

// -(R + delta I)^{-1} r. By default delta = 1e-10 trace(R) / dim.
BatchSolution solve_batch(const CorrelationSystem& cs,
                          std::optional<double> loading = std::nullopt);

// Long division f_hat = -B / A truncated to `length` taps; optionally with
// the mean removed.
FirCoeffs recover_feedback(std::span<const double> a, std::span<const double> b,
                           std::size_t length, bool remove_dc);

// Same division without validation; may return non-finite taps.
std::vector<double> long_division(std::span<const double> a,
                                  std::span<const double> b,
                                  std::size_t length, bool remove_dc);

// Monic A(q) from a_bar.
std::vector<double> monic(std::span<const double> a_bar);

// e[k] for k = 0 .. N-1 with zero history before k = 0.
std::vector<double> prediction_errors(std::span<const double> m,
                                      std::span<const double> l,
                                      std::span<const double> a_bar,
                                      std::span<const double> b);

// Exponentially weighted recursive least squares on the prediction error.
// With lambda = 1 and P(0) = I / delta the weights after n updates are the
// minimiser of sum e^2 + delta |w|^2.
class RlsState {
 public:
  RlsState(std::size_t dim, double delta, double lambda = 1.0);

  // Returns false (and leaves the state untouched) if the update would make
  // anything non-finite.
  bool update(double m_k, std::span<const double> regressor);

  const Eigen::VectorXd& weights() const { return w_; }
  const Eigen::MatrixXd& inverse_correlation() const { return p_; }
  double lambda() const { return lambda_; }
  std::size_t count() const { return count_; }
  std::size_t rollbacks() const { return rollbacks_; }

 private:
  Eigen::MatrixXd p_;
  Eigen::VectorXd w_;
  Eigen::VectorXd pi_;
  Eigen::VectorXd gain_;
  double lambda_;
  std::size_t count_ = 0;
  std::size_t rollbacks_ = 0;
};

// In-loop controller: RLS on every sample from k0 on, estimate recovered
// through -B/A (DC removal and clipping configurable).
class RecursiveAfc : public LoopController {
 public:
  RecursiveAfc(RegressorLayout layout, std::size_t fhat_length, double delta,
               bool remove_dc, double coeff_clip);

  void observe(std::size_t k, std::span<const double> m,
               std::span<const double> l) override;
  std::vector<double> estimate() const override;

  const RlsState& rls() const { return rls_; }
  std::size_t coefficient_clip_events() const { return clip_events_; }

 private:
  RegressorLayout layout_;
  std::size_t fhat_length_;
  bool remove_dc_;
  double coeff_clip_;
  RlsState rls_;
  std::vector<double> regressor_;
  mutable std::vector<double> last_;
  mutable std::size_t clip_events_ = 0;
};

}  // namespace afclab

#endif  // AFCLAB_IDENTIFIER_HPP_
