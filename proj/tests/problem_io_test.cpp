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

#include <cmath>

#include <gtest/gtest.h>

#include "core/problem_io.hpp"
#include "core/problems.hpp"

namespace qpush {
namespace {

std::string DataPath(const std::string& name) {
  return std::string(QPUSH_DATA_DIR) + "/" + name;
}

TEST(ProblemJsonTest, SmallLp) {
  ConvexProgram p = LoadProblemFile(DataPath("small_lp.json"));
  EXPECT_EQ(p.name(), "small-lp");
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.num_constraints(), 1);
  EXPECT_EQ(p.sense(), Sense::kMinimize);
  Vector x(2);
  x << 0.25, 0.5;
  EXPECT_DOUBLE_EQ(p.Objective(x), -1.25);
  EXPECT_DOUBLE_EQ(p.Constraints(x)[0], -0.25);
}

TEST(ProblemJsonTest, QuadraticAndUtility) {
  ConvexProgram q = ParseProblemJson(R"({"n": 1, "m": 0,
      "box": {"lo": [0], "hi": [2]},
      "objective": {"kind": "diag-quadratic", "P": [3], "c": [1]}, "beta": 0})");
  EXPECT_DOUBLE_EQ(q.Objective(Vector::Constant(1, 2.0)), 14.0);
  ConvexProgram u = ParseProblemJson(R"({"n": 2, "m": 1,
      "box": {"lo": [0, 0], "hi": [1, 1]},
      "linear": {"A": [[1, 1]], "b": [1]},
      "objective": {"kind": "neg-log-utility", "weights": [0, 2]}})");
  EXPECT_EQ(u.sense(), Sense::kMaximize);
  Vector x(2);
  x << 0.5, 0.5;
  EXPECT_NEAR(u.NativeValue(u.Objective(x)), 2.0 * std::log(0.5), 1e-15);
}

TEST(ProblemJsonTest, Errors) {
  EXPECT_THROW(ParseProblemJson("{"), Error);
  EXPECT_THROW(ParseProblemJson(R"({"n": 1, "m": 0,
      "box": {"lo": [0], "hi": [1, 2]}, "objective": {"kind": "linear"}})"), Error);
  EXPECT_THROW(ParseProblemJson(R"({"n": 1, "m": 0,
      "box": {"lo": [0], "hi": [1]}, "objective": {"kind": "cubic"}})"), Error);
  EXPECT_THROW(ParseProblemJson(R"({"n": 1, "m": 0,
      "box": {"lo": [0], "hi": [1]},
      "objective": {"kind": "diag-quadratic", "P": [-1]}})"), Error);
  EXPECT_THROW(ParseProblemJson(R"({"n": 1, "m": 1,
      "box": {"lo": [0], "hi": [1]}, "objective": {"kind": "linear"}})"), Error);
  EXPECT_THROW(LoadProblemFile(DataPath("missing.json")), Error);
}

TEST(TopologyJsonTest, MatchesBuiltInFig1) {
  NumProblem from_file = LoadTopologyFile(DataPath("fig1_topology.json"));
  NumProblem built = Fig1NumProblem();
  EXPECT_EQ(from_file.a, built.a);
  EXPECT_EQ(from_file.b, built.b);
  EXPECT_EQ(from_file.x_max, built.x_max);
  EXPECT_EQ(from_file.y_max, built.y_max);
  ASSERT_EQ(from_file.utilities.size(), 3u);
  EXPECT_EQ(from_file.utilities[1].weight, 2.0);
}

TEST(TopologyJsonTest, Errors) {
  EXPECT_THROW(ParseTopologyJson(R"({"capacities": [1],
      "paths": [{"source": 0, "links": [3]}]})"), Error);
  EXPECT_THROW(ParseTopologyJson(R"({"capacities": [1]})"), Error);
}

TEST(ReferenceJsonTest, RoundTrip) {
  ReferenceSolution r = LoadReferenceFile(DataPath("fig1_num_reference.json"));
  EXPECT_NEAR(r.f_star, -1.656870965668732, 1e-15);
  EXPECT_EQ(r.x_star.size(), 10);
  EXPECT_EQ(r.lambda_star.size(), 12);
  ReferenceSolution back = ParseReferenceJson(ReferenceToJson(r));
  EXPECT_EQ(back.f_star, r.f_star);
  EXPECT_EQ(back.x_star, r.x_star);
  EXPECT_EQ(back.lambda_star, r.lambda_star);
  EXPECT_EQ(back.beta.has_value(), r.beta.has_value());
  EXPECT_THROW(ParseReferenceJson(R"({"f_star": 0, "x_star": [0], "lambda_star": [-1]})"),
               Error);
}

}  // namespace
}  // namespace qpush
