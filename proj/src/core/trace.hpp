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

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core/program.hpp"

namespace qpush {

enum class ConstraintMode { kInequality, kEquality };

// Row t describes the step that produced Q(t) from Q(t-1):
//   lyapunov = L(t) = ||Q(t)||^2 / 2, delta = L(t) - L(t-1),
//   bound = Q(t-1)^T g(x(t-1)) + ||g(x(t-1))||^2.
struct DriftRecord {
  std::int64_t t = 0;
  double lyapunov = 0.0;
  double delta = 0.0;
  double bound = 0.0;
};

// State after t iterations: x = x(t-1) (latest iterate), queues = Q(t),
// x_bar = average of x(0..t-1), g_sum = sum of g(x(0..t-1)).
struct TraceRow {
  std::int64_t t = 0;
  Vector x;
  Vector queues;
  double f_x = 0.0;
  Vector g_x;
  Vector x_bar;
  double f_xbar = 0.0;
  Vector g_xbar;
  Vector g_sum;
  DriftRecord drift;
};

// Per-iteration invariant bookkeeping, filled on every step (not only on
// recorded rows).
struct InvariantTally {
  std::int64_t steps_checked = 0;
  std::int64_t queue_negative = 0;        // Q_k(t) >= 0
  std::int64_t weight_negative = 0;       // Q_k(t) + g_k(x(t-1)) >= 0
  std::int64_t queue_norm = 0;            // ||Q(0)|| <= ||g(x(-1))||, ||Q(t)|| >= ||g(x(t-1))||
  std::int64_t drift_bound = 0;           // delta <= bound
  std::int64_t queue_lower_bound = 0;     // Q_k(t) >= sum_{tau<t} g_k(x(tau))
  double worst_weight = 0.0;
  double worst_drift_excess = -std::numeric_limits<double>::infinity();
  double worst_lower_bound_excess = -std::numeric_limits<double>::infinity();

  std::int64_t total_failures() const {
    return queue_negative + weight_negative + queue_norm + drift_bound +
           queue_lower_bound;
  }
};

struct RunConfigEcho {
  std::string problem;
  std::string algorithm;  // "vq", "vq-decentralized" or "dsg"
  double alpha = 0.0;
  double gamma = 0.0;
  std::int64_t iterations = 0;
  std::int64_t record_every = 1;
  std::vector<ConstraintMode> modes;
  std::string oracle;
  Vector x_init;
  std::optional<double> beta;
};

struct RunFailure {
  ErrorCode code = ErrorCode::kNumerical;
  std::int64_t iteration = 0;
  std::string message;
};

struct RunReport {
  RunConfigEcho config;
  std::vector<TraceRow> rows;
  InvariantTally invariants;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  std::int64_t completed_iterations = 0;
  std::optional<RunFailure> failure;

  bool ok() const { return !failure.has_value(); }
  const TraceRow& last() const { return rows.back(); }
};

// 1 for T <= 1000, otherwise ceil(T / 1000).
std::int64_t DefaultRecordEvery(std::int64_t iterations);

bool ShouldRecord(std::int64_t t, std::int64_t iterations, std::int64_t stride);

// Tolerances for the invariant monitor.
inline constexpr double kInvariantTolerance = 1e-9;
inline constexpr double kPerStepAccumulation = 1e-12;

// Shared by every algorithm that maintains queues: checks invariants on each
// step and materializes trace rows on the requested stride.
class TraceRecorder {
 public:
  TraceRecorder(const ConvexProgram& program, RunReport& report,
                std::vector<ConstraintMode> modes, bool queue_checks);

  // Pre-step checks on (Q(t), g(x(t-1))).
  void CheckState(std::int64_t t, const Vector& queues, const Vector& g_prev);

  // Called after the step that produced x(t-1) and Q(t). `increment` is the
  // unprojected queue increment (g(x(t-1)) for virtual queues, gamma*g for
  // dual multipliers) and enters the drift bound.
  void OnStep(std::int64_t t, const Vector& x, const Vector& g_x,
              const Vector& increment, const Vector& queues_before,
              const Vector& queues_after, const Vector& x_bar,
              const Vector& g_sum);

 private:
  const ConvexProgram& program_;
  RunReport& report_;
  std::vector<ConstraintMode> modes_;
  bool queue_checks_;
  bool all_inequality_;
};

}  // namespace qpush
