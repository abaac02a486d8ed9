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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace qpush {

// Axis-aligned box {x : lo <= x <= hi}.
struct BoxSet {
  Vector lo;
  Vector hi;

  // Validates lo <= hi componentwise and finiteness.
  static BoxSet Make(Vector lo, Vector hi);
  static BoxSet Uniform(int n, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  bool Contains(const Vector& x, double tol = 0.0) const;
};

Vector ClampToBox(const Vector& x, const BoxSet& box);

// Scalar convex building block
//   h(x) = quad*x^2 + lin*x - neg_log*log(x) - neg_log1p*log(1 + x).
// Convex whenever quad, neg_log and neg_log1p are nonnegative.
struct ScalarTerm {
  double quad = 0.0;
  double lin = 0.0;
  double neg_log = 0.0;
  double neg_log1p = 0.0;

  double Value(double x) const;
  double Derivative(double x) const;

  bool HasLog() const { return neg_log != 0.0 || neg_log1p != 0.0; }
  bool IsAffine() const { return quad == 0.0 && !HasLog(); }
  bool IsConvex() const {
    return quad >= 0.0 && neg_log >= 0.0 && neg_log1p >= 0.0;
  }

  // sup |h'(x)| over [lo, hi]; +inf when a log term reaches its pole.
  double MaxAbsSlope(double lo, double hi) const;

  ScalarTerm& operator+=(const ScalarTerm& other);
  friend ScalarTerm operator*(double s, const ScalarTerm& t) {
    return {s * t.quad, s * t.lin, s * t.neg_log, s * t.neg_log1p};
  }
};

// g_k(x) = sum over entries with row k of term(x_col) - offset_k.
struct ConstraintEntry {
  int row = 0;
  int col = 0;
  ScalarTerm term;
};

// Fully separable description: f(x) = sum_i objective[i](x_i) and every
// constraint a sum of one-dimensional terms.
struct SeparableModel {
  std::vector<ScalarTerm> objective;
  int num_constraints = 0;
  std::vector<ConstraintEntry> entries;
  Vector offset;

  int dim() const { return static_cast<int>(objective.size()); }
};

struct LinearConstraints {
  Matrix a;
  Vector b;
};

// User-supplied evaluators for programs without exploitable structure.
struct GeneralOracles {
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> objective_subgradient;
  std::function<Vector(const Vector&)> constraints;
  // Row k is a subgradient of g_k.
  std::function<Matrix(const Vector&)> constraint_subgradients;
};

enum class StructureTag { kGeneral, kLinearConstraints, kSeparable };

// Reporting convention only. The library always minimizes f; a maximize
// program reports -f as its native value.
enum class Sense { kMinimize, kMaximize };

struct Evaluation {
  double f = 0.0;
  Vector g;
};

// minimize f(x) s.t. g(x) <= 0, x in box. Immutable and cheap to copy.
class ConvexProgram {
 public:
  static ConvexProgram FromSeparable(std::string name, BoxSet box,
                                     SeparableModel model,
                                     std::optional<double> beta_hint = {});
  static ConvexProgram FromLinear(std::string name, BoxSet box,
                                  std::vector<ScalarTerm> objective, Matrix a,
                                  Vector b,
                                  std::optional<double> beta_hint = {});
  static ConvexProgram FromOracles(std::string name, int n, int m, BoxSet box,
                                   GeneralOracles oracles,
                                   std::optional<double> beta_hint = {});

  int dim() const;
  int num_constraints() const;
  const std::string& name() const;
  const BoxSet& box() const;
  StructureTag structure() const;
  Sense sense() const;
  ConvexProgram WithSense(Sense sense) const;
  ConvexProgram WithName(std::string name) const;

  // Non-null only for the matching structure.
  const SeparableModel* separable() const;
  const LinearConstraints* linear() const;

  double Objective(const Vector& x) const;
  Vector Constraints(const Vector& x) const;
  Vector ObjectiveSubgradient(const Vector& x) const;
  Matrix ConstraintSubgradients(const Vector& x) const;

  // Native-sense objective value: f for minimize, -f for maximize.
  double NativeValue(double f) const {
    return sense() == Sense::kMaximize ? -f : f;
  }

  // Explicit hint if one was supplied, otherwise derived from structure:
  // sigma_max(A) for linear constraints, sigma_max of the derivative-bound
  // matrix for separable ones. Empty when neither is available.
  std::optional<double> beta_hint() const;
  double RequireBeta() const;

  // Box the subproblem solvers work on: lower bounds of coordinates carrying
  // a -log(x) term are lifted to kLogFloor.
  BoxSet OracleBox() const;

 private:
  struct Data;
  explicit ConvexProgram(std::shared_ptr<const Data> data)
      : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

inline constexpr double kLogFloor = 1e-12;

Evaluation Evaluate(const ConvexProgram& program, const Vector& x);

struct SpectralEstimate {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct SpectralOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

// Largest singular value by power iteration on A^T A from the normalized
// all-ones vector.
SpectralEstimate SpectralNorm(const Matrix& a, const SpectralOptions& options = {});

double FrobeniusBound(const Matrix& a);

// Entry (k, i) bounds |d g_k / d x_i| over the box.
Matrix DerivativeBoundMatrix(const SeparableModel& model, const BoxSet& box);

}  // namespace qpush
