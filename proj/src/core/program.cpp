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

#include "core/program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace qpush {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckDim(const Vector& x, int n, const char* what) {
  if (x.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": expected dimension " +
                    std::to_string(n) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace

BoxSet BoxSet::Make(Vector lo, Vector hi) {
  Require(lo.size() == hi.size(), ErrorCode::kInvalidArgument,
          "box: lo and hi differ in length");
  Require(lo.allFinite() && hi.allFinite(), ErrorCode::kInvalidArgument,
          "box: bounds must be finite");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "box: lo > hi at coordinate " + std::to_string(i));
    }
  }
  return BoxSet{std::move(lo), std::move(hi)};
}

BoxSet BoxSet::Uniform(int n, double lo, double hi) {
  return Make(Vector::Constant(n, lo), Vector::Constant(n, hi));
}

bool BoxSet::Contains(const Vector& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] - tol && x[i] <= hi[i] + tol)) return false;
  }
  return true;
}

Vector ClampToBox(const Vector& x, const BoxSet& box) {
  CheckDim(x, box.dim(), "clamp_to_box");
  return x.cwiseMax(box.lo).cwiseMin(box.hi);
}

double ScalarTerm::Value(double x) const {
  double v = quad * x * x + lin * x;
  if (neg_log != 0.0) v -= neg_log * std::log(x);
  if (neg_log1p != 0.0) v -= neg_log1p * std::log1p(x);
  return v;
}

double ScalarTerm::Derivative(double x) const {
  double d = 2.0 * quad * x + lin;
  if (neg_log != 0.0) d -= neg_log / x;
  if (neg_log1p != 0.0) d -= neg_log1p / (1.0 + x);
  return d;
}

double ScalarTerm::MaxAbsSlope(double lo, double hi) const {
  if (neg_log != 0.0 && lo <= 0.0) return kInf;
  if (neg_log1p != 0.0 && lo <= -1.0) return kInf;
  // h' is monotone for convex h, so the extremes sit at the endpoints.
  return std::max(std::abs(Derivative(lo)), std::abs(Derivative(hi)));
}

ScalarTerm& ScalarTerm::operator+=(const ScalarTerm& other) {
  quad += other.quad;
  lin += other.lin;
  neg_log += other.neg_log;
  neg_log1p += other.neg_log1p;
  return *this;
}

struct ConvexProgram::Data {
  std::string name;
  int n = 0;
  int m = 0;
  BoxSet box;
  StructureTag tag = StructureTag::kGeneral;
  Sense sense = Sense::kMinimize;
  std::optional<SeparableModel> separable;
  std::optional<LinearConstraints> linear;
  GeneralOracles oracles;
  std::optional<double> beta;
  BoxSet oracle_box;
};

namespace {

BoxSet LiftLogCoordinates(const BoxSet& box, const SeparableModel& model) {
  BoxSet out = box;
  std::vector<bool> has_log(model.dim(), false);
  for (int i = 0; i < model.dim(); ++i) {
    if (model.objective[i].neg_log != 0.0) has_log[i] = true;
  }
  for (const auto& e : model.entries) {
    if (e.term.neg_log != 0.0) has_log[e.col] = true;
  }
  for (int i = 0; i < model.dim(); ++i) {
    if (has_log[i]) out.lo[i] = std::min(std::max(out.lo[i], kLogFloor), out.hi[i]);
  }
  return out;
}

void ValidateModel(const SeparableModel& model, const BoxSet& box) {
  const int n = model.dim();
  Require(box.dim() == n, ErrorCode::kInvalidArgument,
          "program: box dimension does not match objective");
  Require(model.num_constraints >= 0, ErrorCode::kInvalidArgument,
          "program: negative constraint count");
  Require(model.offset.size() == model.num_constraints,
          ErrorCode::kInvalidArgument,
          "program: offset length must equal constraint count");
  for (int i = 0; i < n; ++i) {
    Require(model.objective[i].IsConvex(), ErrorCode::kConfig,
            "program: objective term " + std::to_string(i) + " is not convex");
  }
  for (const auto& e : model.entries) {
    Require(e.row >= 0 && e.row < model.num_constraints && e.col >= 0 &&
                e.col < n,
            ErrorCode::kInvalidArgument, "program: constraint entry out of range");
    Require(e.term.IsConvex(), ErrorCode::kConfig,
            "program: constraint term (" + std::to_string(e.row) + ", " +
                std::to_string(e.col) + ") is not convex");
  }
}

}  // namespace

ConvexProgram ConvexProgram::FromSeparable(std::string name, BoxSet box,
                                           SeparableModel model,
                                           std::optional<double> beta_hint) {
  ValidateModel(model, box);
  auto data = std::make_shared<Data>();
  data->name = std::move(name);
  data->n = model.dim();
  data->m = model.num_constraints;
  data->box = std::move(box);

  const bool affine = std::all_of(model.entries.begin(), model.entries.end(),
                                  [](const auto& e) { return e.term.IsAffine(); });
  if (affine) {
    LinearConstraints lc{Matrix::Zero(data->m, data->n), model.offset};
    for (const auto& e : model.entries) lc.a(e.row, e.col) += e.term.lin;
    data->tag = StructureTag::kLinearConstraints;
    if (!beta_hint && data->m > 0) beta_hint = SpectralNorm(lc.a).value;
    data->linear = std::move(lc);
  } else {
    data->tag = StructureTag::kSeparable;
    if (!beta_hint) {
      Matrix bound = DerivativeBoundMatrix(model, data->box);
      if (bound.allFinite()) beta_hint = SpectralNorm(bound).value;
    }
  }
  if (data->m == 0 && !beta_hint) beta_hint = 0.0;
  data->beta = beta_hint;
  data->oracle_box = LiftLogCoordinates(data->box, model);
  data->separable = std::move(model);
  return ConvexProgram(std::move(data));
}

ConvexProgram ConvexProgram::FromLinear(std::string name, BoxSet box,
                                        std::vector<ScalarTerm> objective,
                                        Matrix a, Vector b,
                                        std::optional<double> beta_hint) {
  Require(a.rows() == b.size(), ErrorCode::kInvalidArgument,
          "program: A rows must equal length of b");
  Require(a.cols() == static_cast<Eigen::Index>(objective.size()),
          ErrorCode::kInvalidArgument,
          "program: A columns must equal dimension");
  Require(a.allFinite() && b.allFinite(), ErrorCode::kInvalidArgument,
          "program: A and b must be finite");
  SeparableModel model;
  model.objective = std::move(objective);
  model.num_constraints = static_cast<int>(a.rows());
  model.offset = b;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      if (a(k, i) != 0.0) {
        model.entries.push_back({static_cast<int>(k), static_cast<int>(i),
                                 ScalarTerm{0.0, a(k, i), 0.0, 0.0}});
      }
    }
  }
  ConvexProgram p = FromSeparable(std::move(name), std::move(box),
                                  std::move(model), beta_hint);
  // Keep A exactly as given so that g(x) = A x - b bit for bit.
  auto data = std::make_shared<Data>(*p.data_);
  data->linear = LinearConstraints{std::move(a), std::move(b)};
  return ConvexProgram(std::move(data));
}

ConvexProgram ConvexProgram::FromOracles(std::string name, int n, int m,
                                         BoxSet box, GeneralOracles oracles,
                                         std::optional<double> beta_hint) {
  Require(n > 0 && m >= 0, ErrorCode::kInvalidArgument,
          "program: invalid dimensions");
  Require(box.dim() == n, ErrorCode::kInvalidArgument,
          "program: box dimension does not match n");
  Require(oracles.objective && oracles.constraints, ErrorCode::kConfig,
          "program: objective and constraint evaluators are required");
  auto data = std::make_shared<Data>();
  data->name = std::move(name);
  data->n = n;
  data->m = m;
  data->box = box;
  data->oracle_box = std::move(box);
  data->tag = StructureTag::kGeneral;
  data->oracles = std::move(oracles);
  if (m == 0 && !beta_hint) beta_hint = 0.0;
  data->beta = beta_hint;
  return ConvexProgram(std::move(data));
}

int ConvexProgram::dim() const { return data_->n; }
int ConvexProgram::num_constraints() const { return data_->m; }
const std::string& ConvexProgram::name() const { return data_->name; }
const BoxSet& ConvexProgram::box() const { return data_->box; }
StructureTag ConvexProgram::structure() const { return data_->tag; }
Sense ConvexProgram::sense() const { return data_->sense; }
BoxSet ConvexProgram::OracleBox() const { return data_->oracle_box; }
std::optional<double> ConvexProgram::beta_hint() const { return data_->beta; }

ConvexProgram ConvexProgram::WithSense(Sense sense) const {
  auto data = std::make_shared<Data>(*data_);
  data->sense = sense;
  return ConvexProgram(std::move(data));
}

ConvexProgram ConvexProgram::WithName(std::string name) const {
  auto data = std::make_shared<Data>(*data_);
  data->name = std::move(name);
  return ConvexProgram(std::move(data));
}

const SeparableModel* ConvexProgram::separable() const {
  return data_->separable ? &*data_->separable : nullptr;
}

const LinearConstraints* ConvexProgram::linear() const {
  return data_->linear ? &*data_->linear : nullptr;
}

double ConvexProgram::RequireBeta() const {
  if (!data_->beta) {
    throw Error(ErrorCode::kConfig,
                "program '" + data_->name +
                    "': Lipschitz modulus unavailable; supply a beta hint");
  }
  return *data_->beta;
}

double ConvexProgram::Objective(const Vector& x) const {
  CheckDim(x, data_->n, "objective");
  if (const auto* sep = separable()) {
    double f = 0.0;
    for (int i = 0; i < data_->n; ++i) f += sep->objective[i].Value(x[i]);
    return f;
  }
  return data_->oracles.objective(x);
}

Vector ConvexProgram::Constraints(const Vector& x) const {
  CheckDim(x, data_->n, "constraints");
  if (const auto* lin = linear()) return lin->a * x - lin->b;
  if (const auto* sep = separable()) {
    Vector g = -sep->offset;
    for (const auto& e : sep->entries) g[e.row] += e.term.Value(x[e.col]);
    return g;
  }
  Vector g = data_->oracles.constraints(x);
  Require(g.size() == data_->m, ErrorCode::kConfig,
          "constraint evaluator returned wrong length");
  return g;
}

Vector ConvexProgram::ObjectiveSubgradient(const Vector& x) const {
  CheckDim(x, data_->n, "objective subgradient");
  if (const auto* sep = separable()) {
    Vector d(data_->n);
    for (int i = 0; i < data_->n; ++i) d[i] = sep->objective[i].Derivative(x[i]);
    return d;
  }
  Require(static_cast<bool>(data_->oracles.objective_subgradient),
          ErrorCode::kConfig, "program has no objective subgradient evaluator");
  return data_->oracles.objective_subgradient(x);
}

Matrix ConvexProgram::ConstraintSubgradients(const Vector& x) const {
  CheckDim(x, data_->n, "constraint subgradients");
  if (const auto* lin = linear()) return lin->a;
  if (const auto* sep = separable()) {
    Matrix j = Matrix::Zero(data_->m, data_->n);
    for (const auto& e : sep->entries) j(e.row, e.col) += e.term.Derivative(x[e.col]);
    return j;
  }
  if (data_->m == 0) return Matrix::Zero(0, data_->n);
  Require(static_cast<bool>(data_->oracles.constraint_subgradients),
          ErrorCode::kConfig, "program has no constraint subgradient evaluator");
  return data_->oracles.constraint_subgradients(x);
}

Evaluation Evaluate(const ConvexProgram& program, const Vector& x) {
  return {program.Objective(x), program.Constraints(x)};
}

namespace {

SpectralEstimate PowerIterate(const Matrix& a, Vector v,
                              const SpectralOptions& options) {
  SpectralEstimate est;
  v.normalize();
  double rayleigh = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Vector w = a.transpose() * (a * v);
    const double next = v.dot(w);
    const double norm = w.norm();
    est.iterations = it;
    if (norm == 0.0) {
      rayleigh = 0.0;
      est.residual = 0.0;
      break;
    }
    v = w / norm;
    est.residual = std::abs(next - rayleigh);
    rayleigh = next;
    if (it > 1 && est.residual < options.tolerance * std::max(1.0, next)) break;
  }
  est.value = std::sqrt(std::max(rayleigh, 0.0));
  return est;
}

}  // namespace

SpectralEstimate SpectralNorm(const Matrix& a, const SpectralOptions& options) {
  Require(a.allFinite(), ErrorCode::kInvalidArgument,
          "spectral_norm: matrix has non-finite entries");
  if (a.size() == 0 || a.isZero(0.0)) return {};
  const Vector ones = Vector::Ones(a.cols());
  SpectralEstimate est = PowerIterate(a, ones, options);
  // The all-ones start can be orthogonal to the top right singular vector,
  // in which case the iteration stalls on a smaller singular value. A second
  // start nudged along e_1 exposes that.
  Vector nudged = ones;
  nudged[0] += 1.0;
  SpectralEstimate alt = PowerIterate(a, nudged, options);
  if (alt.value > est.value * (1.0 + 1e-9)) {
    alt.iterations += est.iterations;
    return alt;
  }
  return est;
}

double FrobeniusBound(const Matrix& a) { return a.norm(); }

Matrix DerivativeBoundMatrix(const SeparableModel& model, const BoxSet& box) {
  Matrix bound = Matrix::Zero(model.num_constraints, model.dim());
  for (const auto& e : model.entries) {
    bound(e.row, e.col) += e.term.MaxAbsSlope(box.lo[e.col], box.hi[e.col]);
  }
  return bound;
}

}  // namespace qpush
