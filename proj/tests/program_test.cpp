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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "core/netflow.hpp"
#include "core/problems.hpp"
#include "core/program.hpp"
#include "support/reference.hpp"

namespace qpush {
namespace {

using testing::SvdNorm;

ConvexProgram TwoByTwoIdentity() {
  std::vector<ScalarTerm> obj(2, ScalarTerm{0, 1, 0, 0});
  return ConvexProgram::FromLinear("id2", BoxSet::Uniform(2, -5, 5), obj,
                                   Matrix::Identity(2, 2), Vector::Ones(2));
}

TEST(BoxSetTest, RejectsInvertedAndNonFinite) {
  EXPECT_THROW(BoxSet::Make(Vector::Constant(1, 1.0), Vector::Constant(1, 0.0)), Error);
  EXPECT_THROW(BoxSet::Make(Vector::Constant(1, 0.0), Vector::Constant(1, INFINITY)),
               Error);
  EXPECT_THROW(BoxSet::Make(Vector::Zero(2), Vector::Ones(3)), Error);
  EXPECT_NO_THROW(BoxSet::Make(Vector::Constant(1, 0.3), Vector::Constant(1, 0.3)));
}

TEST(ClampToBoxTest, Examples) {
  BoxSet box = BoxSet::Uniform(3, 0, 1);
  Vector x(3);
  x << -1, 0.5, 2;
  Vector expect(3);
  expect << 0, 0.5, 1;
  EXPECT_EQ(ClampToBox(x, box), expect);
  EXPECT_EQ(ClampToBox(expect, box), expect);
  BoxSet point = BoxSet::Uniform(3, 0.3, 0.3);
  EXPECT_EQ(ClampToBox(x, point), Vector::Constant(3, 0.3));
  EXPECT_THROW(ClampToBox(Vector::Zero(2), box), Error);
}

TEST(ClampToBoxTest, OutputAlwaysInside) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::UniformInt(rng, 1, 6);
    Vector lo(n), hi(n), x(n);
    for (int i = 0; i < n; ++i) {
      lo[i] = testing::Uniform(rng, -2, 1);
      hi[i] = lo[i] + testing::Uniform(rng, 0, 2);
      x[i] = testing::Uniform(rng, -5, 5);
    }
    BoxSet box = BoxSet::Make(lo, hi);
    Vector c = ClampToBox(x, box);
    EXPECT_TRUE(box.Contains(c));
    EXPECT_EQ(ClampToBox(c, box), c);
  }
}

TEST(ScalarTermTest, ValueAndDerivative) {
  ScalarTerm t{2.0, -1.0, 0.5, 0.25};
  const double x = 0.7;
  EXPECT_NEAR(t.Value(x), 2 * x * x - x - 0.5 * std::log(x) - 0.25 * std::log1p(x), 1e-15);
  EXPECT_NEAR(t.Derivative(x), 4 * x - 1 - 0.5 / x - 0.25 / (1 + x), 1e-15);
  EXPECT_TRUE(t.IsConvex());
  EXPECT_FALSE((ScalarTerm{-1, 0, 0, 0}).IsConvex());
  EXPECT_TRUE((ScalarTerm{0, 3, 0, 0}).IsAffine());
}

TEST(ScalarTermTest, MaxAbsSlope) {
  EXPECT_DOUBLE_EQ((ScalarTerm{0, 0, 0, 1}).MaxAbsSlope(0, 10), 1.0);
  EXPECT_DOUBLE_EQ((ScalarTerm{1, -1, 0, 0}).MaxAbsSlope(0, 2), 3.0);
  EXPECT_TRUE(std::isinf((ScalarTerm{0, 0, 1, 0}).MaxAbsSlope(0, 1)));
}

TEST(EvaluateTest, IdentityConstraints) {
  Evaluation e = Evaluate(TwoByTwoIdentity(), Vector::Zero(2));
  EXPECT_EQ(e.f, 0.0);
  EXPECT_EQ(e.g, Vector::Constant(2, -1.0));
  EXPECT_THROW(Evaluate(TwoByTwoIdentity(), Vector::Zero(3)), Error);
}

TEST(EvaluateTest, Fig1AtZero) {
  ConvexProgram p = BuildNumProgram(Fig1NumProblem());
  Vector expect = Vector::Zero(12);
  expect.head(9).setConstant(-1.0);
  EXPECT_EQ(p.Constraints(Vector::Zero(10)), expect);
}

TEST(EvaluateTest, QpAtZeroIsMinusE) {
  QpInstance qp = GenerateQp(3);
  ConvexProgram p = BuildQpProgram(qp);
  EXPECT_EQ(p.Constraints(Vector::Zero(100))[0], -qp.e);
}

TEST(EvaluateTest, LinearMatchesAxMinusB) {
  std::mt19937_64 rng(11);
  const int m = 4, n = 6;
  Matrix a = Matrix::NullaryExpr(m, n, [&] { return testing::Uniform(rng, -3, 3); });
  Vector b = Vector::NullaryExpr(m, [&] { return testing::Uniform(rng, -1, 1); });
  ConvexProgram p = ConvexProgram::FromLinear("lin", BoxSet::Uniform(n, -2, 2),
                                              std::vector<ScalarTerm>(n), a, b);
  EXPECT_EQ(p.structure(), StructureTag::kLinearConstraints);
  for (int s = 0; s < 1000; ++s) {
    Vector x = Vector::NullaryExpr(n, [&] { return testing::Uniform(rng, -2, 2); });
    EXPECT_EQ(p.Constraints(x), a * x - b);
  }
}

TEST(ProgramTest, RejectsNonConvexTerms) {
  SeparableModel model;
  model.objective = {ScalarTerm{-1, 0, 0, 0}};
  model.offset = Vector::Zero(0);
  EXPECT_THROW(ConvexProgram::FromSeparable("bad", BoxSet::Uniform(1, 0, 1), model),
               Error);
}

TEST(ProgramTest, SenseOnlyAffectsReporting) {
  ConvexProgram p = TwoByTwoIdentity();
  ConvexProgram q = p.WithSense(Sense::kMaximize);
  Vector x = Vector::Ones(2);
  EXPECT_EQ(p.Objective(x), q.Objective(x));
  EXPECT_EQ(q.NativeValue(q.Objective(x)), -2.0);
}

TEST(ProgramTest, BetaRequiredForGeneralPrograms) {
  GeneralOracles o;
  o.objective = [](const Vector& x) { return x.squaredNorm(); };
  o.constraints = [](const Vector& x) { return Vector::Constant(1, x.sum()); };
  ConvexProgram p = ConvexProgram::FromOracles("g", 2, 1, BoxSet::Uniform(2, 0, 1), o);
  EXPECT_FALSE(p.beta_hint().has_value());
  EXPECT_THROW(p.RequireBeta(), Error);
}

TEST(SpectralNormTest, Examples) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  EXPECT_NEAR(SpectralNorm(d).value, 3.0, 1e-9);
  EXPECT_NEAR(SpectralNorm(Matrix::Ones(2, 2)).value, 2.0, 1e-9);
  SpectralEstimate z = SpectralNorm(Matrix::Zero(3, 2));
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.residual, 0.0);
}

TEST(SpectralNormTest, OrthogonalStartIsRecovered) {
  // The all-ones start is orthogonal to the top right singular vector.
  Matrix a(2, 2);
  a << 2, -2, 0.1, 0.1;
  EXPECT_NEAR(SpectralNorm(a).value, SvdNorm(a), 1e-9);
}

TEST(SpectralNormTest, Fig1MatchesSvd) {
  NumProblem num = Fig1NumProblem();
  SpectralEstimate s = SpectralNorm(num.a);
  EXPECT_NEAR(s.value, SvdNorm(num.a), 1e-9);
  EXPECT_NEAR(s.value, 2.4307877, 1e-7);
  EXPECT_LE(s.residual, 1e-12 * std::max(1.0, s.value * s.value));
}

TEST(SpectralNormTest, RandomAgainstSvdAndPermutation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = testing::UniformInt(rng, 1, 8), c = testing::UniformInt(rng, 1, 8);
    Matrix a = Matrix::NullaryExpr(r, c, [&] { return testing::Uniform(rng, -2, 2); });
    const double s = SpectralNorm(a).value;
    EXPECT_NEAR(s, SvdNorm(a), 1e-6 * std::max(1.0, s));
    EXPECT_GE(FrobeniusBound(a) + 1e-12, s);
    Matrix rev = a.colwise().reverse();
    EXPECT_NEAR(SpectralNorm(rev).value, s, 1e-6 * std::max(1.0, s));
  }
}

TEST(FrobeniusBoundTest, Examples) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 4;
  EXPECT_DOUBLE_EQ(FrobeniusBound(d), 5.0);
  EXPECT_EQ(FrobeniusBound(Matrix::Zero(2, 3)), 0.0);
  NumProblem num = Fig1NumProblem();
  int nonzeros = 0;
  for (Eigen::Index i = 0; i < num.a.size(); ++i) nonzeros += num.a.data()[i] != 0.0;
  EXPECT_EQ(nonzeros, 22);
  EXPECT_DOUBLE_EQ(FrobeniusBound(num.a), std::sqrt(22.0));
}

TEST(DerivativeBoundTest, FlowPowerPattern) {
  ConvexProgram p = BuildFlowPowerProgram(Fig1FlowPowerProblem());
  Matrix bound = DerivativeBoundMatrix(*p.separable(), p.box());
  EXPECT_EQ(bound.rows(), 12);
  EXPECT_EQ(bound.cols(), 19);
  EXPECT_TRUE(((bound.array() == 0.0) || (bound.array() == 1.0)).all());
  EXPECT_NEAR(*p.beta_hint(), SvdNorm(bound), 1e-9);
}

TEST(OracleBoxTest, LiftsLogCoordinates) {
  ConvexProgram p = BuildNumProgram(Fig1NumProblem());
  BoxSet ob = p.OracleBox();
  for (int i = 0; i < 7; ++i) EXPECT_EQ(ob.lo[i], 0.0);
  for (int i = 7; i < 10; ++i) EXPECT_EQ(ob.lo[i], kLogFloor);
}

}  // namespace
}  // namespace qpush
