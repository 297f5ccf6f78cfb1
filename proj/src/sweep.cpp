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

#include "afclab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace afclab {
namespace {

std::size_t as_count(double value, const char* what) {
  if (!(value >= 0.0) || value != std::floor(value)) {
    throw Error(std::string("sweep: ") + what + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(value);
}

void mean_std(const std::vector<double>& x, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (x.empty()) return;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double v : x) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / static_cast<double>(x.size()));
}

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kLength:
      return "length";
    case SweepAxis::kAlpha:
      return "alpha";
    case SweepAxis::kSnr:
      return "snr_db";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "length" || name == "L_GN" || name == "lgn") return SweepAxis::kLength;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "snr" || name == "snr_db") return SweepAxis::kSnr;
  throw Error("unknown sweep axis '" + name + "' (expected length, alpha or snr_db)");
}

const SweepAggregate* SweepResult::aggregate_at(double value) const {
  for (const auto& a : aggregates) {
    if (a.axis_value == value) return &a;
  }
  return nullptr;
}

ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis,
                          double value, std::uint64_t seed) {
  ScenarioConfig cfg = base;
  cfg.feedback_seed = seed;
  switch (axis) {
    case SweepAxis::kLength:
      cfg.forward.length = as_count(value, "length");
      break;
    case SweepAxis::kAlpha:
      cfg.forward.alpha = as_count(value, "alpha");
      if (cfg.forward.kind == ForwardPathKind::kDelay) {
        cfg.forward.length = cfg.forward.alpha + 1;
      }
      break;
    case SweepAxis::kSnr:
      cfg.snr_db = value;
      break;
  }
  return cfg;
}

SweepResult sweep(const ScenarioConfig& base, SweepAxis axis,
                  const std::vector<double>& values,
                  const std::vector<std::uint64_t>& seeds) {
  SweepResult result;
  result.axis = axis;
  result.config_hash = config_hash_hex(base);
  result.rows.resize(values.size() * seeds.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      SweepRow& row = result.rows[v * seeds.size() + s];
      row.axis_value = values[v];
      row.seed = seeds[s];
    }
  }

  const auto n = static_cast<std::ptrdiff_t>(result.rows.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    SweepRow& row = result.rows[static_cast<std::size_t>(i)];
    try {
      row.report = run_scenario(apply_axis(base, axis, row.axis_value, row.seed));
    } catch (const std::exception& e) {
      row.error = e.what();
      row.report.flags |= kFlagRunFailed;
    }
  }
  result.aggregates = aggregate(result.rows);
  return result;
}

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<SweepAggregate> out;
  for (const SweepRow& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepAggregate& a) {
      return a.axis_value == row.axis_value;
    });
    if (it == out.end()) {
      out.push_back(SweepAggregate{});
      out.back().axis_value = row.axis_value;
    }
  }
  for (SweepAggregate& agg : out) {
    std::vector<double> msg, asg, kappa, mis;
    for (const SweepRow& row : rows) {
      if (row.axis_value != agg.axis_value || !row.error.empty()) continue;
      msg.push_back(row.report.msg_db);
      asg.push_back(row.report.asg_db);
      kappa.push_back(row.report.kappa);
      mis.push_back(row.report.misalignment_db);
    }
    agg.runs = asg.size();
    mean_std(msg, agg.msg_mean, agg.msg_std);
    mean_std(asg, agg.asg_mean, agg.asg_std);
    mean_std(kappa, agg.kappa_mean, agg.kappa_std);
    mean_std(mis, agg.misalignment_mean, agg.misalignment_std);
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                    const std::string& comment) {
  out << "# " << comment << '\n';
  out << "axis_value,seed,msg_db,asg_db,kappa,misalignment_db,flags\n";
  for (const SweepRow& row : rows) {
    const MetricsReport& r = row.report;
    out << format_number(row.axis_value) << ',' << row.seed << ','
        << format_number(r.msg_db) << ',' << format_number(r.asg_db) << ','
        << format_number(r.kappa) << ',' << format_number(r.misalignment_db)
        << ',' << flags_to_string(r.flags) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  write_rows_csv(out, result.rows,
                 "afclab sweep axis=" + to_string(result.axis) +
                     " config_hash=" + result.config_hash);
}

void write_summary_csv(std::ostream& out, const SweepResult& result) {
  out << "# afclab sweep summary axis=" << to_string(result.axis)
      << " config_hash=" << result.config_hash << '\n';
  out << "axis_value,runs,msg_mean,msg_std,asg_mean,asg_std,kappa_mean,"
         "kappa_std,misalignment_mean,misalignment_std\n";
  for (const SweepAggregate& a : result.aggregates) {
    out << format_number(a.axis_value) << ',' << a.runs << ','
        << format_number(a.msg_mean) << ',' << format_number(a.msg_std) << ','
        << format_number(a.asg_mean) << ',' << format_number(a.asg_std) << ','
        << format_number(a.kappa_mean) << ',' << format_number(a.kappa_std)
        << ',' << format_number(a.misalignment_mean) << ','
        << format_number(a.misalignment_std) << '\n';
  }
}

}  // namespace afclab
