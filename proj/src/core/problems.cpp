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

#include "core/problems.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "core/oracles.hpp"

namespace qpush {

Topology Fig1Topology() {
  // Path k lists its links; paths 0-1 belong to source 0, 2-4 to source 1,
  // 5-6 to source 2.
  std::vector<PathSpec> paths = {
      {0, {0, 3}}, {0, {1, 4}}, {1, {2, 3}}, {1, {4}},
      {1, {5, 6}}, {2, {6, 7}}, {2, {8}},
  };
  return Topology::FromPaths(Vector::Ones(9), paths, 3);
}

std::vector<Utility> Fig1Utilities() { return {{1.0}, {2.0}, {2.0}}; }

NumProblem Fig1NumProblem() {
  return MakeNumProblem(Fig1Topology(), Fig1Utilities(), Vector::Ones(7),
                        Vector::Constant(3, 3.0));
}

FlowPowerProblem Fig1FlowPowerProblem() {
  FlowPowerProblem fp;
  fp.topology = Fig1Topology();
  fp.utilities = Fig1Utilities();
  fp.x_max = Vector::Constant(7, 3.0);
  fp.y_max = Vector::Constant(3, 3.0);
  fp.p_max = Vector::Constant(9, 10.0);
  return fp;
}

ConvexProgram BuildFlowPowerProgram(const FlowPowerProblem& fp,
                                    std::string name) {
  const Topology& topo = fp.topology;
  topo.Validate();
  const int l_count = topo.num_links;
  const int k_count = topo.num_paths;
  const int s_count = topo.num_sources;
  Require(static_cast<int>(fp.utilities.size()) == s_count &&
              fp.x_max.size() == k_count && fp.y_max.size() == s_count &&
              fp.p_max.size() == l_count,
          ErrorCode::kConfig, "flow-power problem has inconsistent sizes");
  Require((fp.p_max.array() > 0.0).all(), ErrorCode::kConfig,
          "p_max must be positive");
  Require(fp.power_cost >= 0.0, ErrorCode::kConfig, "power cost must be nonnegative");

  const int y0 = k_count;
  const int p0 = k_count + s_count;
  SeparableModel model;
  model.objective.resize(k_count + s_count + l_count);
  for (int s = 0; s < s_count; ++s) {
    model.objective[y0 + s].neg_log = fp.utilities[s].weight;
  }
  for (int l = 0; l < l_count; ++l) model.objective[p0 + l].lin = fp.power_cost;
  model.num_constraints = l_count + s_count;
  model.offset = Vector::Zero(model.num_constraints);
  for (int l = 0; l < l_count; ++l) {
    for (int k : topo.link_paths[l]) model.entries.push_back({l, k, {0, 1, 0, 0}});
    model.entries.push_back({l, p0 + l, {0, 0, 0, 1}});
  }
  for (int s = 0; s < s_count; ++s) {
    for (int k : topo.source_paths[s]) {
      model.entries.push_back({l_count + s, k, {0, -1, 0, 0}});
    }
    model.entries.push_back({l_count + s, y0 + s, {0, 1, 0, 0}});
  }
  Vector lo = Vector::Zero(model.dim());
  Vector hi(model.dim());
  hi << fp.x_max, fp.y_max, fp.p_max;
  return ConvexProgram::FromSeparable(std::move(name), BoxSet::Make(lo, hi),
                                      std::move(model))
      .WithSense(Sense::kMaximize);
}

std::uint64_t SplitMix64::Next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::Uniform01() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

QpInstance GenerateQp(std::uint64_t seed, int n) {
  Require(n > 0, ErrorCode::kInvalidArgument, "QP dimension must be positive");
  SplitMix64 rng(seed);
  QpInstance qp;
  qp.seed = seed;
  qp.p.resize(n);
  qp.c.resize(n);
  qp.q.resize(n);
  qp.d.resize(n);
  for (int i = 0; i < n; ++i) qp.p[i] = rng.Uniform(0.0, 4.0);
  for (int i = 0; i < n; ++i) qp.c[i] = rng.Uniform(-15.0, 20.0);
  for (int i = 0; i < n; ++i) qp.q[i] = rng.Uniform(0.0, 1.0);
  for (int i = 0; i < n; ++i) qp.d[i] = rng.Uniform(-1.0, 1.0);
  qp.e = rng.Uniform(4.0, 5.0);
  return qp;
}

double QpLipschitz(const QpInstance& qp) {
  double sum = 0.0;
  for (int i = 0; i < qp.dim(); ++i) {
    const double m = std::max(std::abs(qp.d[i]), std::abs(2.0 * qp.q[i] + qp.d[i]));
    sum += m * m;
  }
  return std::sqrt(sum);
}

ConvexProgram BuildQpProgram(const QpInstance& qp) {
  const int n = qp.dim();
  SeparableModel model;
  model.objective.resize(n);
  model.num_constraints = 1;
  model.offset = Vector::Constant(1, qp.e);
  for (int i = 0; i < n; ++i) {
    model.objective[i] = {qp.p[i], qp.c[i], 0.0, 0.0};
    model.entries.push_back({0, i, {qp.q[i], qp.d[i], 0.0, 0.0}});
  }
  return ConvexProgram::FromSeparable("qp-" + std::to_string(qp.seed),
                                      BoxSet::Uniform(n, 0.0, 1.0),
                                      std::move(model), QpLipschitz(qp));
}

double QpCoordinateUpdate(const QpInstance& qp, int i, double weight,
                          double alpha, double x_prev) {
  Require(i >= 0 && i < qp.dim(), ErrorCode::kInvalidArgument,
          "coordinate out of range");
  Require(weight >= 0.0 && alpha > 0.0, ErrorCode::kInvalidArgument,
          "coordinate update needs W >= 0 and alpha > 0");
  return SolveSeparableQuadratic(qp.p[i] + weight * qp.q[i] + alpha,
                                 qp.c[i] + weight * qp.d[i] - 2.0 * alpha * x_prev,
                                 0.0, 1.0);
}

std::vector<std::string> ProblemIds() {
  return {"fig1-num", "fig1-flow-power", "qp"};
}

NamedProblem MakeNamedProblem(const std::string& id, std::uint64_t seed) {
  if (id == "fig1-num") {
    NumProblem num = Fig1NumProblem();
    ConvexProgram program = BuildNumProgram(num, id);
    NamedProblem out(id, program, Vector::Zero(program.dim()));
    // log(0.8) + 4 log(1.6) at y = (0.8, 1.6, 1.6).
    out.optimum = std::log(0.8) + 4.0 * std::log(1.6);
    out.published_value = kFig1Optimum;
    out.default_alpha = kFig1Alpha;
    out.num = std::move(num);
    return out;
  }
  if (id == "fig1-flow-power") {
    ConvexProgram program = BuildFlowPowerProgram(Fig1FlowPowerProblem(), id);
    NamedProblem out(id, program, Vector::Zero(program.dim()));
    out.published_value = kFlowPowerOptimum;
    out.default_alpha = kFig1Alpha;
    return out;
  }
  if (id == "qp") {
    ConvexProgram program = BuildQpProgram(GenerateQp(seed));
    NamedProblem out(id, program, Vector::Zero(program.dim()));
    const double beta = *program.beta_hint();
    out.default_alpha = 0.5 * beta * beta + 1.0;
    return out;
  }
  throw Error(ErrorCode::kConfig, "unknown problem '" + id + "'");
}

}  // namespace qpush
