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

// Accumulation kernels for the two-channel normal equations.
//
// The combined regressor at time k is
//
//   i[k] = [m[k-1] .. m[k-L_A+1], l[k] .. l[k-L_B+1]]
//
// and the kernels return the sums
//
//   S = sum_k i[k] i[k]^T,   t = sum_k i[k] m[k],   k = k0 .. N-1,
//
// with burn-in k0 = max(L_A, L_B). All three kernels compute the same sums;
// kReference is the plain serial loop kept as the test oracle.

#ifndef AFCLAB_CORRELATION_HPP_
#define AFCLAB_CORRELATION_HPP_

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace afclab {

enum class CorrelationKernel {
  kReference,  // serial outer-product accumulation
  kParallel,   // OpenMP over sample blocks, per-thread partial sums
  kLagged,     // direct sums on the block borders, shift recursion inside
};

std::string to_string(CorrelationKernel kernel);

struct RegressorLayout {
  std::size_t la = 0;  // L_A, A(q) taps including the leading 1
  std::size_t lb = 0;  // L_B

  std::size_t dim() const { return la - 1 + lb; }
  std::size_t burn_in() const { return la > lb ? la : lb; }
};

struct CorrelationSums {
  Eigen::MatrixXd s;
  Eigen::VectorXd t;
  std::size_t count = 0;  // number of regressors summed
};

// Writes i[k] into `out` (size layout.dim()); samples before 0 read as zero.
void fill_regressor(std::span<const double> m, std::span<const double> l,
                    std::size_t k, const RegressorLayout& layout,
                    std::span<double> out);

CorrelationSums accumulate_correlation(std::span<const double> m,
                                       std::span<const double> l,
                                       const RegressorLayout& layout,
                                       CorrelationKernel kernel);

}  // namespace afclab

#endif  // AFCLAB_CORRELATION_HPP_
