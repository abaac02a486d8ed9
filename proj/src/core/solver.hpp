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
#include <string>
#include <vector>

#include "core/oracles.hpp"
#include "core/program.hpp"
#include "core/trace.hpp"

namespace qpush {

// Iteration state of the virtual-queue method. After t steps:
//   x_prev = x(t-1), g_prev = g(x(t-1)), queues = Q(t),
//   x_bar = average of x(0..t-1) (empty while t == 0),
//   g_sum = sum of g(x(0..t-1)).
struct SolverState {
  std::int64_t t = 0;
  Vector x_prev;
  Vector g_prev;
  Vector queues;
  Vector x_bar;
  Vector g_sum;
  double alpha = 0.0;
  std::vector<ConstraintMode> modes;
};

// Q_k(0) = max{0, -g_k(x_init)} for inequality rows, 0 for equality rows.
// An empty `modes` means every row is an inequality.
SolverState InitState(const ConvexProgram& program, const Vector& x_init,
                      double alpha, std::vector<ConstraintMode> modes = {});

// Inequality: Q' = max{-g, Q + g}. Equality: Q' = Q + g.
Vector QueueUpdate(const Vector& queues, const Vector& g_now,
                   const std::vector<ConstraintMode>& modes);
Vector QueueUpdate(const Vector& queues, const Vector& g_now,
                   ConstraintMode mode = ConstraintMode::kInequality);

// One iteration: x(t) from the penalized subproblem with weights
// Q(t) + g(x(t-1)), then queues and running average.
SolverState Step(const SolverState& state, const ConvexProgram& program,
                 const PrimalOracle& oracle = Dispatch);

struct SolverOptions {
  double alpha = 1.0;
  std::int64_t iterations = 1;
  std::int64_t record_every = 0;  // 0 selects DefaultRecordEvery
  std::vector<ConstraintMode> modes;
  PrimalOracle oracle;  // empty selects Dispatch
  std::string oracle_id;
};

// init followed by `iterations` steps. Step failures do not throw; the
// partial trace is returned with `failure` set.
RunReport Run(const ConvexProgram& program, const Vector& x_init,
              const SolverOptions& options);

// Warnings about alpha relative to beta^2/2 (empty when alpha is fine).
std::vector<std::string> AlphaWarnings(double alpha,
                                       std::optional<double> beta);

}  // namespace qpush
