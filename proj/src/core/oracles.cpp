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

#include "core/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qpush {

double Subproblem::Objective(const Vector& x) const {
  double v = program->Objective(x) + alpha * (x - x_prev).squaredNorm();
  if (weights.size() > 0) v += weights.dot(program->Constraints(x));
  return v;
}

Vector Subproblem::Gradient(const Vector& x) const {
  Vector grad = program->ObjectiveSubgradient(x) + 2.0 * alpha * (x - x_prev);
  if (weights.size() > 0) {
    grad += program->ConstraintSubgradients(x).transpose() * weights;
  }
  return grad;
}

double SolveSeparableQuadratic(double a, double b, double lo, double hi) {
  Require(a > 0.0, ErrorCode::kInvalidArgument,
          "separable quadratic: leading coefficient must be positive");
  Require(lo <= hi, ErrorCode::kInvalidArgument,
          "separable quadratic: empty interval");
  return std::clamp(-b / (2.0 * a), lo, hi);
}

double SolveScalarConvex(const std::function<double(double)>& derivative,
                         double lo, double hi, double tol) {
  Require(tol > 0.0, ErrorCode::kInvalidArgument,
          "scalar solve: tolerance must be positive");
  Require(lo <= hi, ErrorCode::kInvalidArgument, "scalar solve: empty interval");
  auto eval = [&](double x) {
    const double d = derivative(x);
    if (!std::isfinite(d)) {
      throw Error(ErrorCode::kNumerical,
                  "scalar solve: non-finite derivative at " + std::to_string(x));
    }
    return d;
  };
  if (eval(lo) >= 0.0) return lo;
  if (eval(hi) <= 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
    const double d = eval(mid);
    if (d > 0.0) {
      hi = mid;
    } else if (d < 0.0) {
      lo = mid;
    } else {
      return mid;
    }
  }
  return 0.5 * (lo + hi);
}

double SolveLogQuadratic(double weight, double quad, double lin, double lo,
                         double hi) {
  Require(weight > 0.0, ErrorCode::kInvalidArgument,
          "log quadratic: weight must be positive");
  Require(quad >= 0.0, ErrorCode::kInvalidArgument,
          "log quadratic: quadratic coefficient must be nonnegative");
  double root;
  if (quad > 0.0) {
    const double disc = std::sqrt(lin * lin + 8.0 * quad * weight);
    // Pick the cancellation-free form of the positive root.
    root = lin >= 0.0 ? 2.0 * weight / (lin + disc) : (disc - lin) / (4.0 * quad);
  } else if (lin > 0.0) {
    root = weight / lin;
  } else {
    root = hi;
  }
  return std::clamp(root, lo, hi);
}

double MinimizeScalarTerm(const ScalarTerm& term, double lo, double hi,
                          double tol) {
  Require(term.IsConvex(), ErrorCode::kConfig,
          "scalar term is not convex (negative weight on a curved term)");
  if (term.neg_log > 0.0) lo = std::min(std::max(lo, kLogFloor), hi);
  if (!term.HasLog()) {
    if (term.quad > 0.0) return SolveSeparableQuadratic(term.quad, term.lin, lo, hi);
    return term.lin < 0.0 ? hi : lo;
  }
  if (term.neg_log1p == 0.0) {
    return SolveLogQuadratic(term.neg_log, term.quad, term.lin, lo, hi);
  }
  return SolveScalarConvex([&term](double x) { return term.Derivative(x); }, lo,
                           hi, tol);
}

Vector SolveProjectedGradient(const Subproblem& sub,
                              const ProjectedGradientOptions& options) {
  Require(sub.program != nullptr, ErrorCode::kInvalidArgument,
          "subproblem has no program");
  Require(sub.alpha > 0.0, ErrorCode::kInvalidArgument,
          "projected gradient needs alpha > 0");
  const BoxSet box = sub.program->OracleBox();
  const double beta = sub.program->beta_hint().value_or(0.0);
  const double weight_norm = sub.weights.size() > 0 ? sub.weights.norm() : 0.0;
  double step = 1.0 / (2.0 * sub.alpha + weight_norm * beta);

  Vector x = ClampToBox(sub.x_prev, box);
  double hx = sub.Objective(x);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector grad = sub.Gradient(x);
    residual = (x - ClampToBox(x - grad, box)).norm();
    if (residual < options.tolerance) return x;
    // Backtrack until the local curvature estimate is below 1/step. The
    // gradient form avoids cancellation in h once steps get small.
    for (int bt = 0; bt < 60; ++bt) {
      Vector cand = ClampToBox(x - step * grad, box);
      const Vector delta = cand - x;
      const double hc = sub.Objective(cand);
      if (std::isfinite(hc)) {
        const double curvature = (sub.Gradient(cand) - grad).dot(delta);
        if (curvature <= delta.squaredNorm() / step ||
            hc <= hx + grad.dot(delta) + delta.squaredNorm() / (2.0 * step)) {
          x = std::move(cand);
          hx = hc;
          step *= 1.25;
          break;
        }
      }
      step *= 0.5;
    }
  }
  throw NonConvergenceError(
      "projected gradient: no convergence after " +
          std::to_string(options.max_iterations) + " iterations (residual " +
          std::to_string(residual) + ")",
      x, residual);
}

std::string_view RouteName(OracleRoute route) {
  switch (route) {
    case OracleRoute::kClosedForm:
      return "closed-form";
    case OracleRoute::kScalarBisection:
      return "scalar-bisection";
    case OracleRoute::kProjectedGradient:
      return "projected-gradient";
  }
  return "unknown";
}

OracleRoute RouteFor(const ConvexProgram& program) {
  const SeparableModel* sep = program.separable();
  if (sep == nullptr) return OracleRoute::kProjectedGradient;
  bool curved = false;
  for (const auto& t : sep->objective) curved |= t.neg_log1p != 0.0;
  for (const auto& e : sep->entries) curved |= e.term.neg_log1p != 0.0;
  return curved ? OracleRoute::kScalarBisection : OracleRoute::kClosedForm;
}

namespace {

// Per-coordinate aggregate of f_i + sum_k w_k g_ki.
std::vector<ScalarTerm> WeightedTerms(const SeparableModel& model,
                                      const Vector& weights) {
  std::vector<ScalarTerm> terms = model.objective;
  for (const auto& e : model.entries) terms[e.col] += weights[e.row] * e.term;
  return terms;
}

}  // namespace

Vector Dispatch(const Subproblem& sub) {
  Require(sub.program != nullptr, ErrorCode::kInvalidArgument,
          "subproblem has no program");
  const ConvexProgram& program = *sub.program;
  Require(sub.alpha > 0.0, ErrorCode::kInvalidArgument,
          "subproblem requires alpha > 0");
  Require(sub.x_prev.size() == program.dim() &&
              sub.weights.size() == program.num_constraints(),
          ErrorCode::kInvalidArgument, "subproblem dimension mismatch");
  const SeparableModel* sep = program.separable();
  if (sep == nullptr) return SolveProjectedGradient(sub);

  std::vector<ScalarTerm> terms = WeightedTerms(*sep, sub.weights);
  const BoxSet& box = program.box();
  Vector x(program.dim());
  for (int i = 0; i < program.dim(); ++i) {
    ScalarTerm t = terms[i];
    t.quad += sub.alpha;
    t.lin -= 2.0 * sub.alpha * sub.x_prev[i];
    if (!t.IsConvex()) {
      throw Error(ErrorCode::kConfig,
                  "subproblem coordinate " + std::to_string(i) +
                      " is not convex; negative weight on a nonlinear constraint");
    }
    x[i] = MinimizeScalarTerm(t, box.lo[i], box.hi[i]);
  }
  return x;
}

Vector MinimizeLagrangian(const ConvexProgram& program, const Vector& lambda) {
  const SeparableModel* sep = program.separable();
  Require(sep != nullptr, ErrorCode::kConfig,
          "lagrangian minimization needs a separable program");
  Require(lambda.size() == program.num_constraints(),
          ErrorCode::kInvalidArgument, "lagrangian: multiplier length mismatch");
  std::vector<ScalarTerm> terms = WeightedTerms(*sep, lambda);
  const BoxSet& box = program.box();
  Vector x(program.dim());
  for (int i = 0; i < program.dim(); ++i) {
    x[i] = MinimizeScalarTerm(terms[i], box.lo[i], box.hi[i]);
  }
  return x;
}

}  // namespace qpush
