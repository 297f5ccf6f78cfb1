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

#include <vector>

#include <omp.h>

#include "afclab/signals.hpp"

namespace afclab {
namespace {

// One regressor entry: signal sample at k - lag.
struct Lane {
  const double* x;
  std::size_t lag;
  bool first;  // first lane of its block (no lag - 1 predecessor)
};

std::vector<Lane> make_lanes(std::span<const double> m,
                             std::span<const double> l,
                             const RegressorLayout& layout) {
  std::vector<Lane> lanes;
  lanes.reserve(layout.dim());
  for (std::size_t p = 0; p + 1 < layout.la; ++p) {
    lanes.push_back({m.data(), p + 1, p == 0});
  }
  for (std::size_t q = 0; q < layout.lb; ++q) {
    lanes.push_back({l.data(), q, q == 0});
  }
  return lanes;
}

void mirror_upper(Eigen::MatrixXd& s) {
  for (Eigen::Index a = 0; a < s.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < s.cols(); ++b) s(b, a) = s(a, b);
  }
}

CorrelationSums reference_kernel(std::span<const double> m,
                                 std::span<const double> l,
                                 const RegressorLayout& layout) {
  const std::size_t dim = layout.dim();
  const std::size_t n = m.size();
  CorrelationSums out;
  out.s = Eigen::MatrixXd::Zero(dim, dim);
  out.t = Eigen::VectorXd::Zero(dim);
  std::vector<double> reg(dim);
  for (std::size_t k = layout.burn_in(); k < n; ++k) {
    fill_regressor(m, l, k, layout, reg);
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a; b < dim; ++b) out.s(a, b) += reg[a] * reg[b];
      out.t(a) += reg[a] * m[k];
    }
  }
  mirror_upper(out.s);
  out.count = n - layout.burn_in();
  return out;
}

CorrelationSums parallel_kernel(std::span<const double> m,
                                std::span<const double> l,
                                const RegressorLayout& layout) {
  const std::size_t dim = layout.dim();
  const auto k0 = static_cast<std::ptrdiff_t>(layout.burn_in());
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  CorrelationSums out;
  out.s = Eigen::MatrixXd::Zero(dim, dim);
  out.t = Eigen::VectorXd::Zero(dim);

#pragma omp parallel
  {
    Eigen::MatrixXd s_local = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd t_local = Eigen::VectorXd::Zero(dim);
    std::vector<double> reg(dim);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t k = k0; k < n; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      fill_regressor(m, l, ku, layout, reg);
      for (std::size_t a = 0; a < dim; ++a) {
        const double ra = reg[a];
        for (std::size_t b = a; b < dim; ++b) s_local(a, b) += ra * reg[b];
        t_local(a) += ra * m[ku];
      }
    }
#pragma omp critical
    {
      out.s += s_local;
      out.t += t_local;
    }
  }
  mirror_upper(out.s);
  out.count = m.size() - layout.burn_in();
  return out;
}

double lane_dot(const Lane& a, const Lane& b, std::size_t k0, std::size_t n) {
  const double* x = a.x + (k0 - a.lag);
  const double* y = b.x + (k0 - b.lag);
  const std::size_t count = n - k0;
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) acc += x[k] * y[k];
  return acc;
}

// Entry (a, b) with both lanes having a predecessor equals the entry of the
// predecessors plus the sample entering at k0 minus the one leaving at N:
//   S(a, b) = S(a-1, b-1) + x_a[k0 - lag_a] x_b[k0 - lag_b]
//                         - x_a[N - lag_a] x_b[N - lag_b].
CorrelationSums lagged_kernel(std::span<const double> m,
                              std::span<const double> l,
                              const RegressorLayout& layout) {
  const std::size_t dim = layout.dim();
  const std::size_t k0 = layout.burn_in();
  const std::size_t n = m.size();
  const auto lanes = make_lanes(m, l, layout);
  CorrelationSums out;
  out.s = Eigen::MatrixXd::Zero(dim, dim);
  out.t = Eigen::VectorXd::Zero(dim);

  std::vector<std::pair<std::size_t, std::size_t>> direct;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      if (lanes[a].first || lanes[b].first) direct.emplace_back(a, b);
    }
  }
  const Lane target{m.data(), 0, true};
  const auto n_direct = static_cast<std::ptrdiff_t>(direct.size());
  const auto n_dim = static_cast<std::ptrdiff_t>(dim);

#pragma omp parallel
  {
#pragma omp for schedule(dynamic, 4) nowait
    for (std::ptrdiff_t i = 0; i < n_direct; ++i) {
      const auto [a, b] = direct[static_cast<std::size_t>(i)];
      out.s(a, b) = lane_dot(lanes[a], lanes[b], k0, n);
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t a = 0; a < n_dim; ++a) {
      out.t(a) = lane_dot(lanes[static_cast<std::size_t>(a)], target, k0, n);
    }
  }

  for (std::size_t a = 0; a < dim; ++a) {
    if (lanes[a].first) continue;
    const double* x = lanes[a].x;
    const std::size_t la = lanes[a].lag;
    for (std::size_t b = a; b < dim; ++b) {
      if (lanes[b].first) continue;
      const double* y = lanes[b].x;
      const std::size_t lb = lanes[b].lag;
      out.s(a, b) = out.s(a - 1, b - 1) + x[k0 - la] * y[k0 - lb] -
                    x[n - la] * y[n - lb];
    }
  }
  mirror_upper(out.s);
  out.count = n - k0;
  return out;
}

}  // namespace

std::string to_string(CorrelationKernel kernel) {
  switch (kernel) {
    case CorrelationKernel::kReference:
      return "reference";
    case CorrelationKernel::kParallel:
      return "parallel";
    case CorrelationKernel::kLagged:
      return "lagged";
  }
  return "?";
}

void fill_regressor(std::span<const double> m, std::span<const double> l,
                    std::size_t k, const RegressorLayout& layout,
                    std::span<double> out) {
  std::size_t idx = 0;
  for (std::size_t p = 1; p < layout.la; ++p) {
    out[idx++] = (k >= p && k - p < m.size()) ? m[k - p] : 0.0;
  }
  for (std::size_t q = 0; q < layout.lb; ++q) {
    out[idx++] = (k >= q && k - q < l.size()) ? l[k - q] : 0.0;
  }
}

CorrelationSums accumulate_correlation(std::span<const double> m,
                                       std::span<const double> l,
                                       const RegressorLayout& layout,
                                       CorrelationKernel kernel) {
  if (layout.la < 1 || layout.lb < 1) {
    throw Error("accumulate_correlation: L_A and L_B must be >= 1");
  }
  if (m.size() != l.size()) {
    throw Error("accumulate_correlation: m and l differ in length");
  }
  if (m.size() <= layout.burn_in()) {
    throw Error("accumulate_correlation: need more than " +
                std::to_string(layout.burn_in()) + " samples, got " +
                std::to_string(m.size()));
  }
  switch (kernel) {
    case CorrelationKernel::kReference:
      return reference_kernel(m, l, layout);
    case CorrelationKernel::kParallel:
      return parallel_kernel(m, l, layout);
    case CorrelationKernel::kLagged:
      return lagged_kernel(m, l, layout);
  }
  throw Error("accumulate_correlation: bad kernel");
}

}  // namespace afclab
