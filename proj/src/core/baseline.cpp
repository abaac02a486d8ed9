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

#include "core/baseline.hpp"

#include <chrono>

#include "core/oracles.hpp"

namespace qpush {

namespace {

// Advances in place; returns lambda(t) before the update.
Vector Advance(DualState& s, const ConvexProgram& program, Vector& g_now) {
  Vector x = MinimizeLagrangian(program, s.lambda);
  g_now = program.Constraints(x);
  Vector before = s.lambda;
  s.lambda = (s.lambda + s.step * g_now).cwiseMax(0.0);
  if (s.t == 0) {
    s.x_bar = x;
  } else {
    const double td = static_cast<double>(s.t);
    s.x_bar = s.x_bar * (td / (td + 1.0)) + x * (1.0 / (td + 1.0));
  }
  s.g_sum += g_now;
  s.x_prev = std::move(x);
  ++s.t;
  return before;
}

}  // namespace

DualState InitDual(const ConvexProgram& program, double step) {
  Require(step >= 0.0, ErrorCode::kInvalidArgument, "dual step size must be nonnegative");
  Require(program.separable() != nullptr, ErrorCode::kConfig,
          "dual subgradient needs a separable program");
  DualState s;
  s.step = step;
  s.lambda = Vector::Zero(program.num_constraints());
  s.g_sum = Vector::Zero(program.num_constraints());
  return s;
}

DualState DualStep(const DualState& state, const ConvexProgram& program) {
  DualState next = state;
  Vector g;
  Advance(next, program, g);
  return next;
}

RunReport DsgRun(const ConvexProgram& program, double step,
                 std::int64_t iterations, std::int64_t record_every) {
  Require(iterations >= 1, ErrorCode::kInvalidArgument,
          "iteration count must be at least 1");
  Require(step > 0.0, ErrorCode::kInvalidArgument, "dual step size must be positive");
  const auto start = std::chrono::steady_clock::now();
  DualState state = InitDual(program, step);

  RunReport report;
  report.config.problem = program.name();
  report.config.algorithm = "dsg";
  report.config.gamma = step;
  report.config.iterations = iterations;
  report.config.record_every =
      record_every > 0 ? record_every : DefaultRecordEvery(iterations);
  report.config.modes.assign(program.num_constraints(), ConstraintMode::kInequality);
  report.config.oracle = "lagrangian";
  report.config.beta = program.beta_hint();

  TraceRecorder recorder(program, report, report.config.modes,
                         /*queue_checks=*/false);
  Vector g;
  for (std::int64_t it = 0; it < iterations; ++it) {
    try {
      Vector before = Advance(state, program, g);
      recorder.OnStep(state.t, state.x_prev, g, step * g, before, state.lambda,
                      state.x_bar, state.g_sum);
    } catch (const Error& e) {
      report.failure = RunFailure{e.code(), it,
                                  "iteration " + std::to_string(it) + ": " + e.what()};
      break;
    }
    report.completed_iterations = state.t;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace qpush
