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

#include "core/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace qpush {

namespace {

void Record(BoundCheck& check, std::int64_t t, double margin, double slack) {
  ++check.checked;
  check.worst_margin = std::max(check.worst_margin, margin);
  if (margin > slack) {
    if (check.violations == 0) check.first_violation_t = t;
    ++check.violations;
  }
}

void Finish(BoundCheck& check) {
  if (check.status == BoundStatus::kSkipped && !check.note.empty()) return;
  check.status = check.violations > 0 ? BoundStatus::kFailed : BoundStatus::kPassed;
}

double MaxComponent(const Vector& v) {
  return v.size() == 0 ? -std::numeric_limits<double>::infinity() : v.maxCoeff();
}

}  // namespace

bool BoundReport::passed() const {
  for (const BoundCheck* c : {&objective, &constraint, &queue_norm, &queue_lower}) {
    if (c->status == BoundStatus::kFailed) return false;
  }
  return true;
}

const BoundCheck& BoundReport::check(int i) const {
  switch (i) {
    case 0:
      return objective;
    case 1:
      return constraint;
    case 2:
      return queue_norm;
    default:
      return queue_lower;
  }
}

std::string_view BoundStatusName(BoundStatus status) {
  switch (status) {
    case BoundStatus::kPassed:
      return "passed";
    case BoundStatus::kFailed:
      return "failed";
    case BoundStatus::kSkipped:
      return "skipped";
  }
  return "unknown";
}

BoundReport VerifyBounds(const RunReport& report, const ConvexProgram& program,
                         const ReferenceSolution& reference, double slack) {
  Require(report.config.algorithm.rfind("vq", 0) == 0, ErrorCode::kConfig,
          "bounds apply to virtual-queue runs only, not '" +
              report.config.algorithm + "'");
  Require(reference.x_star.size() == program.dim(), ErrorCode::kInvalidArgument,
          "reference x_star has wrong dimension");
  Require(reference.lambda_star.size() == program.num_constraints(),
          ErrorCode::kInvalidArgument, "reference lambda_star has wrong dimension");
  Require(report.config.x_init.size() == program.dim(), ErrorCode::kInvalidArgument,
          "report does not carry x(-1) for this program");

  BoundReport out;
  out.alpha = report.config.alpha;
  std::optional<double> beta = reference.beta ? reference.beta : program.beta_hint();
  Require(beta.has_value(), ErrorCode::kConfig,
          "bounds need a Lipschitz modulus; supply beta in the reference");
  out.beta = *beta;
  const double half_beta_sq = 0.5 * out.beta * out.beta;
  const double dist = (reference.x_star - report.config.x_init).norm();
  out.objective_constant = out.alpha * dist * dist;
  if (out.alpha > half_beta_sq) {
    const double g_star = program.Constraints(reference.x_star).norm();
    out.queue_constant = 2.0 * reference.lambda_star.norm() +
                         std::sqrt(2.0 * out.alpha) * dist +
                         std::sqrt(out.alpha / (out.alpha - half_beta_sq)) * g_star;
  } else {
    out.constraint.note = "alpha <= beta^2/2";
    out.queue_norm.note = "alpha <= beta^2/2";
  }
  if (out.alpha < half_beta_sq) out.objective.note = "alpha < beta^2/2";

  for (const TraceRow& row : report.rows) {
    if (row.t < 1) continue;
    const double t = static_cast<double>(row.t);
    BoundRowResidual res;
    res.t = row.t;
    if (out.objective.note.empty()) {
      res.objective = row.f_xbar - (reference.f_star + out.objective_constant / t);
      Record(out.objective, row.t, res.objective, slack);
    }
    if (out.queue_constant) {
      const double violation = std::max(0.0, MaxComponent(row.g_xbar));
      res.constraint = violation - *out.queue_constant / t;
      Record(out.constraint, row.t, res.constraint, slack);
      Record(out.queue_norm, row.t, row.queues.norm() - *out.queue_constant, slack);
    }
    Record(out.queue_lower, row.t, MaxComponent(row.g_sum - row.queues), slack);
    out.rows.push_back(res);
  }
  Finish(out.objective);
  Finish(out.constraint);
  Finish(out.queue_norm);
  Finish(out.queue_lower);
  return out;
}

}  // namespace qpush
