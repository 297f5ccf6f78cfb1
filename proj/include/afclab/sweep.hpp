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

// Parameter sweeps over forward-path length, forward-path delay or input
// SNR, one scenario per (value, feedback-path seed).

#ifndef AFCLAB_SWEEP_HPP_
#define AFCLAB_SWEEP_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "afclab/metrics.hpp"
#include "afclab/scenario.hpp"

namespace afclab {

enum class SweepAxis { kLength, kAlpha, kSnr };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepRow {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  MetricsReport report;
  std::string error;  // non-empty when the run failed
};

struct SweepAggregate {
  double axis_value = 0.0;
  std::size_t runs = 0;  // successful runs only
  double msg_mean = 0.0, msg_std = 0.0;
  double asg_mean = 0.0, asg_std = 0.0;
  double kappa_mean = 0.0, kappa_std = 0.0;
  double misalignment_mean = 0.0, misalignment_std = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kLength;
  std::string config_hash;
  std::vector<SweepRow> rows;  // value-major, then seed, in input order
  std::vector<SweepAggregate> aggregates;

  const SweepAggregate* aggregate_at(double value) const;
};

// Base config with one axis value applied and the feedback seed replaced.
// For delay forward paths the alpha axis sets length = alpha + 1.
ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis,
                          double value, std::uint64_t seed);

// Rows run in parallel (OpenMP) but are stored in deterministic order.
SweepResult sweep(const ScenarioConfig& base, SweepAxis axis,
                  const std::vector<double>& values,
                  const std::vector<std::uint64_t>& seeds);

// Mean and (population) standard deviation across seeds per axis value.
std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows);

// "%.6g" formatting used by every CSV writer.
std::string format_number(double v);

// One header row: axis_value,seed,msg_db,asg_db,kappa,misalignment_db,flags,
// preceded by a '#' comment carrying the resolved config hash.
void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                    const std::string& comment);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_summary_csv(std::ostream& out, const SweepResult& result);

}  // namespace afclab

#endif  // AFCLAB_SWEEP_HPP_
