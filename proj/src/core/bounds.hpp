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
#include <utility>
#include <vector>

#include "core/program.hpp"
#include "core/trace.hpp"

namespace qpush {

// Reference optimum used to instantiate the convergence bounds.
struct ReferenceSolution {
  double f_star = 0.0;
  Vector x_star;
  Vector lambda_star;
  std::optional<double> beta;  // falls back to the program's beta hint
};

enum class BoundStatus { kPassed, kFailed, kSkipped };

struct BoundCheck {
  explicit BoundCheck(std::string check_name = {}) : name(std::move(check_name)) {}

  std::string name;
  BoundStatus status = BoundStatus::kSkipped;
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  std::int64_t first_violation_t = -1;
  // max over checked rows of (lhs - rhs); negative means slack everywhere.
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::string note;
};

// Residuals written next to each trace row; NaN when the bound is skipped.
struct BoundRowResidual {
  std::int64_t t = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double constraint = std::numeric_limits<double>::quiet_NaN();
};

struct BoundReport {
  double alpha = 0.0;
  double beta = 0.0;
  // alpha * ||x* - x(-1)||^2
  double objective_constant = 0.0;
  // 2||lambda*|| + sqrt(2 alpha)||x* - x(-1)|| + sqrt(alpha/(alpha - beta^2/2))||g(x*)||
  std::optional<double> queue_constant;

  BoundCheck objective{"objective"};
  BoundCheck constraint{"constraint"};
  BoundCheck queue_norm{"queue_norm"};
  BoundCheck queue_lower{"queue_lower"};
  std::vector<BoundRowResidual> rows;

  bool passed() const;
  const BoundCheck& check(int i) const;
};

// Checks on every recorded row t >= 1:
//   (a) f(x_bar(t)) <= f* + alpha ||x* - x(-1)||^2 / t
//   (b) max_k g_k(x_bar(t)) <= C / t
//   (c) ||Q(t)|| <= C
//   (d) Q_k(t) >= sum_{tau<t} g_k(x(tau))
// (b) and (c) are skipped when alpha <= beta^2/2; (a) when alpha < beta^2/2.
BoundReport VerifyBounds(const RunReport& report, const ConvexProgram& program,
                         const ReferenceSolution& reference,
                         double slack = 1e-9);

std::string_view BoundStatusName(BoundStatus status);

}  // namespace qpush
