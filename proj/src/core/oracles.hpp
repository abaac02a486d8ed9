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

#include <functional>
#include <string_view>

#include "core/program.hpp"

namespace qpush {

// argmin_{x in box} f(x) + weights^T g(x) + alpha * ||x - x_prev||^2
struct Subproblem {
  const ConvexProgram* program = nullptr;
  Vector weights;
  Vector x_prev;
  double alpha = 0.0;

  double Objective(const Vector& x) const;
  Vector Gradient(const Vector& x) const;
};

// Exact minimizer of a*x^2 + b*x on [lo, hi]; a must be positive.
double SolveSeparableQuadratic(double a, double b, double lo, double hi);

// Bisection on the sign of a nondecreasing derivative. Returns lo when
// derivative(lo) >= 0, hi when derivative(hi) <= 0, otherwise the midpoint of
// a bracket no wider than tol.
double SolveScalarConvex(const std::function<double(double)>& derivative,
                         double lo, double hi, double tol = 1e-12);

// Closed form for quad*x^2 + lin*x - weight*log(x) on [lo, hi] with
// weight > 0: the positive root of 2*quad*x^2 + lin*x - weight = 0.
double SolveLogQuadratic(double weight, double quad, double lin, double lo,
                         double hi);

// Minimizes a convex ScalarTerm on [lo, hi], picking the closed form when one
// exists. A linear term (quad == 0, no logs) resolves to an endpoint: lo for a
// positive or zero slope, hi for a negative one.
double MinimizeScalarTerm(const ScalarTerm& term, double lo, double hi,
                          double tol = 1e-12);

struct ProjectedGradientOptions {
  double tolerance = 1e-10;
  int max_iterations = 200000;
};

// Generic fallback: projected gradient with backtracking, started from the
// projected x_prev. Throws NonConvergenceError after max_iterations.
Vector SolveProjectedGradient(const Subproblem& sub,
                              const ProjectedGradientOptions& options = {});

enum class OracleRoute { kClosedForm, kScalarBisection, kProjectedGradient };

std::string_view RouteName(OracleRoute route);

// Route dispatch() would take for a program (the coarsest route any
// coordinate needs).
OracleRoute RouteFor(const ConvexProgram& program);

// Solves the penalized subproblem: per coordinate for separable programs,
// projected gradient otherwise.
Vector Dispatch(const Subproblem& sub);

// argmin_{x in box} f(x) + lambda^T g(x) with no proximal term. Only
// separable programs are supported.
Vector MinimizeLagrangian(const ConvexProgram& program, const Vector& lambda);

using PrimalOracle = std::function<Vector(const Subproblem&)>;

}  // namespace qpush
