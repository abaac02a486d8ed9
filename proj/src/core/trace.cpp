// Copyright 2026 The qpush Authors
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

#include "core/trace.hpp"

#include <algorithm>
#include <cmath>

namespace qpush {

std::int64_t DefaultRecordEvery(std::int64_t iterations) {
  if (iterations <= 1000) return 1;
  return (iterations + 999) / 1000;
}

bool ShouldRecord(std::int64_t t, std::int64_t iterations, std::int64_t stride) {
  return t == 1 || t == iterations || (stride > 0 && t % stride == 0);
}

TraceRecorder::TraceRecorder(const ConvexProgram& program, RunReport& report,
                             std::vector<ConstraintMode> modes,
                             bool queue_checks)
    : program_(program),
      report_(report),
      modes_(std::move(modes)),
      queue_checks_(queue_checks) {
  all_inequality_ = std::all_of(modes_.begin(), modes_.end(), [](auto m) {
    return m == ConstraintMode::kInequality;
  });
}

void TraceRecorder::CheckState(std::int64_t t, const Vector& queues,
                               const Vector& g_prev) {
  if (!queue_checks_) return;
  auto& tally = report_.invariants;
  bool negative = false;
  bool weight = false;
  for (Eigen::Index k = 0; k < queues.size(); ++k) {
    if (modes_[k] != ConstraintMode::kInequality) continue;
    if (queues[k] < 0.0) negative = true;
    const double w = queues[k] + g_prev[k];
    tally.worst_weight = std::min(tally.worst_weight, w);
    if (w < -kInvariantTolerance) weight = true;
  }
  tally.queue_negative += negative;
  tally.weight_negative += weight;
  if (all_inequality_) {
    const double qn = queues.norm();
    const double gn = g_prev.norm();
    const bool bad = t == 0 ? qn > gn + kInvariantTolerance
                            : qn < gn - kInvariantTolerance;
    tally.queue_norm += bad;
  }
}

void TraceRecorder::OnStep(std::int64_t t, const Vector& x, const Vector& g_x,
                           const Vector& increment,
                           const Vector& queues_before,
                           const Vector& queues_after, const Vector& x_bar,
                           const Vector& g_sum) {
  auto& tally = report_.invariants;
  DriftRecord drift;
  drift.t = t;
  const double l_before = 0.5 * queues_before.squaredNorm();
  drift.lyapunov = 0.5 * queues_after.squaredNorm();
  drift.delta = drift.lyapunov - l_before;
  drift.bound = queues_before.dot(increment) + increment.squaredNorm();
  const double excess = drift.delta - drift.bound;
  tally.worst_drift_excess = std::max(tally.worst_drift_excess, excess);
  // Absolute tolerance at unit scale, relative once queues grow large.
  if (excess > kInvariantTolerance * std::max(1.0, drift.lyapunov)) {
    ++tally.drift_bound;
  }
  if (queue_checks_) {
    const double slack =
        kInvariantTolerance + static_cast<double>(t) * kPerStepAccumulation;
    bool bad = false;
    for (Eigen::Index k = 0; k < g_sum.size(); ++k) {
      const double gap = g_sum[k] - queues_after[k];
      tally.worst_lower_bound_excess = std::max(tally.worst_lower_bound_excess, gap);
      if (gap > slack) bad = true;
    }
    tally.queue_lower_bound += bad;
  }
  ++tally.steps_checked;

  if (!ShouldRecord(t, report_.config.iterations, report_.config.record_every)) {
    return;
  }
  TraceRow row;
  row.t = t;
  row.x = x;
  row.queues = queues_after;
  row.f_x = program_.Objective(x);
  row.g_x = g_x;
  row.x_bar = x_bar;
  row.f_xbar = program_.Objective(x_bar);
  row.g_xbar = program_.Constraints(x_bar);
  row.g_sum = g_sum;
  row.drift = drift;
  report_.rows.push_back(std::move(row));
}

}  // namespace qpush
