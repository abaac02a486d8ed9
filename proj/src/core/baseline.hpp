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

#include "core/program.hpp"
#include "core/trace.hpp"

namespace qpush {

// Dual subgradient state after t steps: lambda = lambda(t), x_bar averages
// the Lagrangian minimizers x(0..t-1).
struct DualState {
  std::int64_t t = 0;
  Vector lambda;
  Vector x_prev;
  Vector x_bar;
  Vector g_sum;
  double step = 0.01;
};

DualState InitDual(const ConvexProgram& program, double step);

// x(t) = argmin_{x in box} f(x) + lambda^T g(x), then
// lambda(t+1) = max{lambda(t) + step * g(x(t)), 0}.
DualState DualStep(const DualState& state, const ConvexProgram& program);

// Same report schema as the virtual-queue run; rows carry lambda in `queues`.
RunReport DsgRun(const ConvexProgram& program, double step,
                 std::int64_t iterations, std::int64_t record_every = 0);

}  // namespace qpush
