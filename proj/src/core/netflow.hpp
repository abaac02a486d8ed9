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
#include <vector>

#include "core/program.hpp"
#include "core/trace.hpp"

namespace qpush {

struct PathSpec {
  int source = 0;
  std::vector<int> links;
};

// Multipath network: L links, K paths, S sources. Every path belongs to
// exactly one source.
struct Topology {
  int num_links = 0;
  int num_paths = 0;
  int num_sources = 0;
  Vector capacity;
  std::vector<std::vector<int>> link_paths;    // D_l
  std::vector<std::vector<int>> path_links;    // E_k
  std::vector<std::vector<int>> source_paths;  // P_s
  std::vector<int> path_source;

  // Paths are indexed in the order given; sources 0..S-1 must each own one.
  static Topology FromPaths(Vector capacity, const std::vector<PathSpec>& paths,
                            int num_sources);
  // Throws kConfig on any inconsistency.
  void Validate() const;
  int total_hops() const;

  Matrix RoutingMatrix() const;  // R, L x K
  Matrix SourceMatrix() const;   // T, S x K
};

// U_s(y) = weight * log(y).
struct Utility {
  double weight = 1.0;
};

struct NumProblem {
  Topology topology;
  std::vector<Utility> utilities;
  Vector x_max;
  Vector y_max;
  Matrix a;  // [R 0; -T I]
  Vector b;  // [c; 0]
};

NumProblem MakeNumProblem(Topology topology, std::vector<Utility> utilities,
                          Vector x_max, Vector y_max);

// maximize sum_s U_s(y_s) over z = (x, y), posed as minimizing the negation
// subject to A z <= b. Reported in the maximize sense.
ConvexProgram BuildNumProgram(const NumProblem& problem,
                              std::string name = "num");

struct BetaBounds {
  double hop_bound = 0.0;    // sqrt(S + K + sum_k |E_k|)
  double loose_bound = 0.0;  // sqrt((L + 1) K + S)
};

BetaBounds ComputeBetaBounds(const Topology& topology);

struct SimulationOptions {
  double alpha = 1.0;
  std::int64_t iterations = 1;
  std::int64_t record_every = 0;
  Vector x_init;  // empty means zero
  Vector y_init;  // empty means zero
  // Processes agents in a seeded random order within each phase.
  std::optional<std::uint64_t> shuffle_seed;
};

struct MessageStats {
  std::int64_t price_messages = 0;
  std::int64_t rate_messages = 0;
  std::int64_t rounds = 0;
};

struct LinkAgentState {
  double queue = 0.0;  // Q_l
  double price = 0.0;  // Y_l
};

struct SourceAgentState {
  double queue = 0.0;  // R_s
  double price = 0.0;  // Z_s
  double rate = 0.0;   // y_s
};

struct SimulationResult {
  RunReport report;
  MessageStats messages;
  std::vector<LinkAgentState> links;
  std::vector<SourceAgentState> sources;
  Vector path_rates;
};

// Synchronous rounds of per-link and per-source agents. Round t: links
// publish Y_l(t) to the paths they carry; sources update their path rates
// and source rate, then their own queue, and publish the new path rates;
// links fold the rates into Q_l(t+1). Report rows use z = (x, y) and queues
// (Q, R), matching a centralized run on BuildNumProgram.
SimulationResult SimulateDecentralized(const NumProblem& problem,
                                       const SimulationOptions& options);

}  // namespace qpush
