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
#include <random>

#include <gtest/gtest.h>

#include "core/netflow.hpp"
#include "core/problems.hpp"
#include "core/solver.hpp"
#include "support/reference.hpp"

namespace qpush {
namespace {

double MaxTraceGap(const RunReport& a, const RunReport& b) {
  EXPECT_EQ(a.rows.size(), b.rows.size());
  double gap = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows.size(), b.rows.size()); ++i) {
    EXPECT_EQ(a.rows[i].t, b.rows[i].t);
    gap = std::max(gap, (a.rows[i].x - b.rows[i].x).cwiseAbs().maxCoeff());
    gap = std::max(gap, (a.rows[i].queues - b.rows[i].queues).cwiseAbs().maxCoeff());
    gap = std::max(gap, (a.rows[i].x_bar - b.rows[i].x_bar).cwiseAbs().maxCoeff());
  }
  return gap;
}

TEST(TopologyTest, SinglePathInstance) {
  Topology t = Topology::FromPaths(Vector::Ones(1), {{0, {0}}}, 1);
  NumProblem p = MakeNumProblem(t, {{1.0}}, Vector::Ones(1), Vector::Ones(1));
  Matrix a(2, 2);
  a << 1, 0, -1, 1;
  EXPECT_EQ(p.a, a);
  EXPECT_EQ(p.b, (Vector(2) << 1, 0).finished());
  BetaBounds b = ComputeBetaBounds(t);
  EXPECT_DOUBLE_EQ(b.hop_bound, std::sqrt(3.0));
}

TEST(TopologyTest, RejectsMalformed) {
  EXPECT_THROW(Topology::FromPaths(Vector::Ones(1), {{1, {0}}}, 1), Error);
  EXPECT_THROW(Topology::FromPaths(Vector::Ones(1), {{0, {2}}}, 1), Error);
  EXPECT_THROW(Topology::FromPaths(Vector::Ones(1), {{0, {0, 0}}}, 1), Error);
  EXPECT_THROW(Topology::FromPaths(Vector::Zero(1), {{0, {0}}}, 1), Error);
  // Source 1 owns no path.
  EXPECT_THROW(Topology::FromPaths(Vector::Ones(1), {{0, {0}}}, 2), Error);
  Topology t = Fig1Topology();
  t.link_paths[0].push_back(3);
  EXPECT_THROW(t.Validate(), Error);
}

TEST(TopologyTest, Fig1Matrices) {
  Topology t = Fig1Topology();
  Matrix r(9, 7);
  r << 1, 0, 0, 0, 0, 0, 0,
       0, 1, 0, 0, 0, 0, 0,
       0, 0, 1, 0, 0, 0, 0,
       1, 0, 1, 0, 0, 0, 0,
       0, 1, 0, 1, 0, 0, 0,
       0, 0, 0, 0, 1, 0, 0,
       0, 0, 0, 0, 1, 1, 0,
       0, 0, 0, 0, 0, 1, 0,
       0, 0, 0, 0, 0, 0, 1;
  Matrix tm(3, 7);
  tm << 1, 1, 0, 0, 0, 0, 0,
        0, 0, 1, 1, 1, 0, 0,
        0, 0, 0, 0, 0, 1, 1;
  EXPECT_EQ(t.RoutingMatrix(), r);
  EXPECT_EQ(t.SourceMatrix(), tm);
  EXPECT_EQ(t.capacity, Vector::Ones(9));
  EXPECT_EQ(t.source_paths[1], (std::vector<int>{2, 3, 4}));
  NumProblem p = Fig1NumProblem();
  EXPECT_EQ(p.a.rows(), 12);
  EXPECT_EQ(p.a.cols(), 10);
}

TEST(BetaBoundsTest, Fig1) {
  Topology t = Fig1Topology();
  const int hops = static_cast<int>(t.RoutingMatrix().sum());
  EXPECT_EQ(t.total_hops(), hops);
  BetaBounds b = ComputeBetaBounds(t);
  EXPECT_DOUBLE_EQ(b.hop_bound, std::sqrt(3.0 + 7.0 + hops));
  EXPECT_DOUBLE_EQ(b.hop_bound, FrobeniusBound(Fig1NumProblem().a));
  EXPECT_NEAR(b.loose_bound, std::sqrt(73.0), 1e-15);
  EXPECT_LE(b.hop_bound, b.loose_bound);
  EXPECT_LE(SpectralNorm(Fig1NumProblem().a).value, b.hop_bound);
}

TEST(BetaBoundsTest, RandomTopologies) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    NumProblem p = testing::RandomNumProblem(rng, 10, 8);
    BetaBounds b = ComputeBetaBounds(p.topology);
    EXPECT_LE(b.hop_bound, b.loose_bound + 1e-12);
    EXPECT_LE(SpectralNorm(p.a).value, b.hop_bound + 1e-9);
  }
}

TEST(BuildNumProgramTest, StructureAndSense) {
  ConvexProgram p = BuildNumProgram(Fig1NumProblem());
  EXPECT_EQ(p.structure(), StructureTag::kLinearConstraints);
  EXPECT_EQ(p.sense(), Sense::kMaximize);
  EXPECT_NEAR(*p.beta_hint(), 2.4307877, 1e-7);
}

TEST(SimulateTest, Fig1Initialization) {
  SimulationOptions o;
  o.alpha = 10;
  o.iterations = 1;
  o.record_every = 1;
  SimulationResult sim = SimulateDecentralized(Fig1NumProblem(), o);
  // Prices used in round 0: Y_l(0) = 1 + 0 - 1, Z_s(0) = 0.
  for (const auto& l : sim.links) EXPECT_EQ(l.price, 0.0);
  for (const auto& s : sim.sources) EXPECT_EQ(s.price, 0.0);
  EXPECT_EQ(sim.messages.rounds, 1);
}

TEST(SimulateTest, Fig1FirstRoundMatchesCentralizedStep) {
  ConvexProgram p = BuildNumProgram(Fig1NumProblem());
  SolverState s = Step(InitState(p, Vector::Zero(10), 10.0), p);
  SimulationOptions o;
  o.alpha = 10;
  o.iterations = 1;
  o.record_every = 1;
  SimulationResult sim = SimulateDecentralized(Fig1NumProblem(), o);
  EXPECT_EQ(sim.report.rows[0].x, s.x_prev);
  EXPECT_EQ(sim.report.rows[0].queues, s.queues);
}

TEST(SimulateTest, Fig1MatchesCentralized) {
  NumProblem num = Fig1NumProblem();
  SimulationOptions so;
  so.alpha = 10;
  so.iterations = 1000;
  so.record_every = 1;
  SimulationResult sim = SimulateDecentralized(num, so);
  SolverOptions o;
  o.alpha = 10;
  o.iterations = 1000;
  o.record_every = 1;
  RunReport central = qpush::Run(BuildNumProgram(num), Vector::Zero(10), o);
  EXPECT_LE(MaxTraceGap(sim.report, central), 1e-9);
  EXPECT_EQ(sim.report.invariants.total_failures(), 0);
}

TEST(SimulateTest, MessageCounts) {
  Topology t = Fig1Topology();
  SimulationOptions o;
  o.alpha = 10;
  o.iterations = 7;
  SimulationResult sim = SimulateDecentralized(Fig1NumProblem(), o);
  std::int64_t per_round_price = 0;
  for (const auto& d : t.link_paths) per_round_price += static_cast<std::int64_t>(d.size());
  EXPECT_EQ(sim.messages.price_messages, 7 * per_round_price);
  EXPECT_EQ(sim.messages.rate_messages, 7 * t.total_hops());
}

TEST(SimulateTest, ShuffledOrderIsIdentical) {
  std::mt19937_64 rng(99);
  NumProblem num = testing::RandomNumProblem(rng, 10, 8);
  SimulationOptions o;
  o.alpha = 5;
  o.iterations = 200;
  o.record_every = 1;
  SimulationResult a = SimulateDecentralized(num, o);
  o.shuffle_seed = 12345;
  SimulationResult b = SimulateDecentralized(num, o);
  EXPECT_EQ(MaxTraceGap(a.report, b.report), 0.0);
}

TEST(SimulateTest, PricesNonnegativeOnRandomTopologies) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    NumProblem num = testing::RandomNumProblem(rng, 10, 8);
    SimulationOptions o;
    o.alpha = 0.5 * std::pow(ComputeBetaBounds(num.topology).hop_bound, 2) + 1;
    o.iterations = 300;
    SimulationResult sim = SimulateDecentralized(num, o);
    ASSERT_TRUE(sim.report.ok());
    EXPECT_EQ(sim.report.invariants.total_failures(), 0);
    for (const auto& l : sim.links) EXPECT_GE(l.price, -1e-12);
    for (const auto& s : sim.sources) EXPECT_GE(s.price, -1e-12);
  }
}

TEST(SimulateTest, RejectsBadInit) {
  SimulationOptions o;
  o.alpha = 10;
  o.x_init = Vector::Constant(7, 2.0);
  EXPECT_THROW(SimulateDecentralized(Fig1NumProblem(), o), Error);
  o.x_init = Vector();
  o.alpha = 0;
  EXPECT_THROW(SimulateDecentralized(Fig1NumProblem(), o), Error);
}

}  // namespace
}  // namespace qpush
