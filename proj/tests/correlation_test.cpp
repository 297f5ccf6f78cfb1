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

#include "afclab/correlation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "afclab/identifier.hpp"
#include "afclab/signals.hpp"

namespace afclab {
namespace {

double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

TEST(RegressorTest, LayoutAndZeroPadding) {
  const RegressorLayout layout{3, 2};
  EXPECT_EQ(layout.dim(), 4u);
  EXPECT_EQ(layout.burn_in(), 3u);
  const std::vector<double> m{1, 2, 3, 4, 5};
  const std::vector<double> l{10, 20, 30, 40, 50};
  std::vector<double> out(4);
  fill_regressor(m, l, 4, layout, out);
  EXPECT_EQ(out, (std::vector<double>{4, 3, 50, 40}));
  fill_regressor(m, l, 0, layout, out);
  EXPECT_EQ(out, (std::vector<double>{0, 0, 10, 0}));
}

TEST(NormalEquationsTest, HandComputedAverages) {
  const std::vector<double> m{1, 2, 3, 4};
  const std::vector<double> l{0, 1, 0, 1};
  Eigen::MatrixXd r_ref(3, 3);
  r_ref << 6.5, 1.5, 1.0, 1.5, 0.5, 0.0, 1.0, 0.0, 0.5;
  const Eigen::Vector3d v_ref(9.0, 2.0, 1.5);
  for (auto kernel : {CorrelationKernel::kReference, CorrelationKernel::kParallel,
                      CorrelationKernel::kLagged}) {
    const CorrelationSystem cs = build_normal_equations(m, l, 2, 2, kernel);
    EXPECT_EQ(cs.n_samples, 2u) << to_string(kernel);
    EXPECT_LT((cs.R - r_ref).cwiseAbs().maxCoeff(), 1e-15) << to_string(kernel);
    EXPECT_LT((cs.r - v_ref).cwiseAbs().maxCoeff(), 1e-15) << to_string(kernel);
  }
}

TEST(NormalEquationsTest, InsufficientSamples) {
  const std::vector<double> m{1, 2, 3};
  EXPECT_THROW(build_normal_equations(m, m, 2, 3), Error);
  const std::vector<double> shorter{1, 2};
  EXPECT_THROW(build_normal_equations(m, shorter, 2, 1), Error);
}

struct KernelCase {
  std::size_t la, lb, n;
};

void PrintTo(const KernelCase& c, std::ostream* os) {
  *os << "{la=" << c.la << ", lb=" << c.lb << ", n=" << c.n << "}";
}

class KernelAgreementTest : public ::testing::TestWithParam<KernelCase> {};

TEST_P(KernelAgreementTest, KernelsMatchReference) {
  const KernelCase c = GetParam();
  const Signal m = white_noise(c.n, 100 + c.la);
  const Signal w = white_noise(c.n, 200 + c.lb);
  const Signal l = fir_filter(FirCoeffs{0.0, 0.6, -0.2}, w);
  const RegressorLayout layout{c.la, c.lb};
  const auto ref = accumulate_correlation(m.view(), l.view(), layout,
                                          CorrelationKernel::kReference);
  for (auto kernel : {CorrelationKernel::kParallel, CorrelationKernel::kLagged}) {
    const auto got = accumulate_correlation(m.view(), l.view(), layout, kernel);
    EXPECT_EQ(got.count, ref.count);
    EXPECT_LT(max_rel_diff(got.s, ref.s), 1e-10) << to_string(kernel);
    EXPECT_LT((got.t - ref.t).cwiseAbs().maxCoeff() / ref.t.cwiseAbs().maxCoeff(),
              1e-10)
        << to_string(kernel);
    EXPECT_EQ(got.s, got.s.transpose()) << to_string(kernel);
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, KernelAgreementTest,
                         ::testing::Values(KernelCase{2, 2, 50}, KernelCase{1, 4, 40},
                                           KernelCase{10, 73, 5000},
                                           KernelCase{20, 83, 3000},
                                           KernelCase{10, 3, 1000}),
                         [](const ::testing::TestParamInfo<KernelCase>& info) {
                           const KernelCase& c = info.param;
                           return "la" + std::to_string(c.la) + "_lb" + std::to_string(c.lb) +
                                  "_n" + std::to_string(c.n);
                         });

TEST(NormalEquationsTest, SymmetricPositiveSemidefinite) {
  const Signal m = white_noise(20000, 7);
  const Signal l = fir_filter(FirCoeffs{0.0, 1.0, 0.5}, m);
  const CorrelationSystem cs = build_normal_equations(m.view(), l.view(), 10, 20);
  ASSERT_EQ(cs.R.rows(), 29);
  EXPECT_LE((cs.R - cs.R.transpose()).cwiseAbs().maxCoeff(),
            1e-12 * cs.R.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cs.R);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * cs.R.trace());
}

TEST(NormalEquationsTest, IndependentWhiteInputsDecorrelate) {
  const std::size_t n = 100000;
  const Signal m = white_noise(n, 11);
  const Signal l = white_noise(n, 12);
  const CorrelationSystem cs = build_normal_equations(m.view(), l.view(), 4, 3);
  // Cross block m-lags x l-lags; standard error of a mean of products of
  // independent unit-variance samples is 1/sqrt(n).
  const double bound = 3.0 / std::sqrt(static_cast<double>(cs.n_samples));
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 3; j < 6; ++j) EXPECT_LT(std::abs(cs.R(i, j)), bound);
  }
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_NEAR(cs.R(i, i), 1.0, 0.02);
}

}  // namespace
}  // namespace afclab
