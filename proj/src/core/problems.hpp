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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/netflow.hpp"
#include "core/program.hpp"

namespace qpush {

// Three sources, seven paths, nine unit-capacity links.
Topology Fig1Topology();
std::vector<Utility> Fig1Utilities();  // weights 1, 2, 2
// x_max = 1 per path, y_max = 3 per source.
NumProblem Fig1NumProblem();

// Published reference numbers for the bundled instances.
inline constexpr double kFig1Optimum = 1.65687;
inline constexpr double kFig1Beta = 2.4307;
inline constexpr double kFlowPowerBeta = 2.5229;
inline constexpr double kFlowPowerOptimum = -0.521318;
inline constexpr double kFig1Alpha = 10.0;

// Joint flow and power control over z = (x, y, p):
//   minimize -sum_s U_s(y_s) + cost * sum_l p_l
//   s.t. sum_{k in D_l} x_k <= log(1 + p_l),  y_s <= sum_{k in P_s} x_k.
struct FlowPowerProblem {
  Topology topology;
  std::vector<Utility> utilities;
  Vector x_max;
  Vector y_max;
  Vector p_max;
  double power_cost = 0.25;
};

FlowPowerProblem Fig1FlowPowerProblem();  // x_max = 3, y_max = 3, p_max = 10
ConvexProgram BuildFlowPowerProgram(const FlowPowerProblem& problem,
                                    std::string name = "flow-power");

// SplitMix64 (Steele, Lea, Flood). Uniform doubles use the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t Next();
  double Uniform01();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

 private:
  std::uint64_t state_;
};

// minimize sum_i p_i x_i^2 + c_i x_i
// s.t. sum_i q_i x_i^2 + d_i x_i <= e,  0 <= x <= 1.
struct QpInstance {
  std::uint64_t seed = 0;
  Vector p;
  Vector c;
  Vector q;
  Vector d;
  double e = 0.0;

  int dim() const { return static_cast<int>(p.size()); }
};

// Draws p ~ U[0,4], c ~ U[-15,20], q ~ U[0,1], d ~ U[-1,1], e ~ U[4,5], in
// that order.
QpInstance GenerateQp(std::uint64_t seed, int n = 100);
ConvexProgram BuildQpProgram(const QpInstance& qp);

// sup over the unit box of ||grad g||.
double QpLipschitz(const QpInstance& qp);

// Minimizer over [0,1] of (p_i + W q_i + alpha) x^2 + (c_i + W d_i - 2 alpha x_prev) x.
double QpCoordinateUpdate(const QpInstance& qp, int i, double weight,
                          double alpha, double x_prev);

struct NamedProblem {
  NamedProblem(std::string problem_id, ConvexProgram p, Vector x0)
      : id(std::move(problem_id)), program(std::move(p)), x_init(std::move(x0)) {}

  std::string id;
  ConvexProgram program;
  Vector x_init;
  std::optional<double> optimum;      // native sense, when known
  std::optional<double> published_value;  // published value, native sense
  double default_alpha = 1.0;
  std::optional<NumProblem> num;      // set for network instances
};

// "fig1-num", "fig1-flow-power", "qp" (uses seed).
NamedProblem MakeNamedProblem(const std::string& id, std::uint64_t seed = 1);
std::vector<std::string> ProblemIds();

}  // namespace qpush
