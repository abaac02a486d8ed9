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

#include "core/netflow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "core/oracles.hpp"
#include "core/solver.hpp"

namespace qpush {

Topology Topology::FromPaths(Vector capacity, const std::vector<PathSpec>& paths,
                             int num_sources) {
  Topology t;
  t.num_links = static_cast<int>(capacity.size());
  t.num_paths = static_cast<int>(paths.size());
  t.num_sources = num_sources;
  t.capacity = std::move(capacity);
  t.link_paths.assign(t.num_links, {});
  t.path_links.assign(t.num_paths, {});
  t.source_paths.assign(std::max(num_sources, 0), {});
  t.path_source.assign(t.num_paths, -1);
  for (int k = 0; k < t.num_paths; ++k) {
    const PathSpec& p = paths[k];
    Require(p.source >= 0 && p.source < num_sources, ErrorCode::kConfig,
            "path " + std::to_string(k) + " names an unknown source");
    t.path_source[k] = p.source;
    t.source_paths[p.source].push_back(k);
    std::vector<int> links = p.links;
    std::sort(links.begin(), links.end());
    Require(std::adjacent_find(links.begin(), links.end()) == links.end(),
            ErrorCode::kConfig, "path " + std::to_string(k) + " repeats a link");
    for (int l : links) {
      Require(l >= 0 && l < t.num_links, ErrorCode::kConfig,
              "path " + std::to_string(k) + " uses an unknown link");
      t.link_paths[l].push_back(k);
    }
    t.path_links[k] = std::move(links);
  }
  t.Validate();
  return t;
}

void Topology::Validate() const {
  Require(num_links > 0 && num_paths > 0 && num_sources > 0, ErrorCode::kConfig,
          "topology needs at least one link, path and source");
  Require(capacity.size() == num_links, ErrorCode::kConfig,
          "capacity length must equal the link count");
  Require(static_cast<int>(link_paths.size()) == num_links &&
              static_cast<int>(path_links.size()) == num_paths &&
              static_cast<int>(source_paths.size()) == num_sources &&
              static_cast<int>(path_source.size()) == num_paths,
          ErrorCode::kConfig, "topology index sets have wrong sizes");
  for (int l = 0; l < num_links; ++l) {
    Require(std::isfinite(capacity[l]) && capacity[l] > 0.0, ErrorCode::kConfig,
            "link capacities must be positive");
    for (int k : link_paths[l]) {
      Require(k >= 0 && k < num_paths, ErrorCode::kConfig, "bad path index");
      const auto& e = path_links[k];
      Require(std::find(e.begin(), e.end(), l) != e.end(), ErrorCode::kConfig,
              "link and path index sets are not transposes");
    }
  }
  std::vector<int> owner(num_paths, -1);
  for (int s = 0; s < num_sources; ++s) {
    Require(!source_paths[s].empty(), ErrorCode::kConfig,
            "source " + std::to_string(s) + " has no path");
    for (int k : source_paths[s]) {
      Require(k >= 0 && k < num_paths && owner[k] == -1, ErrorCode::kConfig,
              "source path sets must partition the paths");
      owner[k] = s;
    }
  }
  for (int k = 0; k < num_paths; ++k) {
    Require(owner[k] == path_source[k], ErrorCode::kConfig,
            "path owner does not match source path set");
    for (int l : path_links[k]) {
      Require(l >= 0 && l < num_links, ErrorCode::kConfig, "bad link index");
      const auto& d = link_paths[l];
      Require(std::find(d.begin(), d.end(), k) != d.end(), ErrorCode::kConfig,
              "link and path index sets are not transposes");
    }
  }
}

int Topology::total_hops() const {
  int hops = 0;
  for (const auto& e : path_links) hops += static_cast<int>(e.size());
  return hops;
}

Matrix Topology::RoutingMatrix() const {
  Matrix r = Matrix::Zero(num_links, num_paths);
  for (int k = 0; k < num_paths; ++k) {
    for (int l : path_links[k]) r(l, k) = 1.0;
  }
  return r;
}

Matrix Topology::SourceMatrix() const {
  Matrix t = Matrix::Zero(num_sources, num_paths);
  for (int k = 0; k < num_paths; ++k) t(path_source[k], k) = 1.0;
  return t;
}

NumProblem MakeNumProblem(Topology topology, std::vector<Utility> utilities,
                          Vector x_max, Vector y_max) {
  topology.Validate();
  const int l_count = topology.num_links;
  const int k_count = topology.num_paths;
  const int s_count = topology.num_sources;
  Require(static_cast<int>(utilities.size()) == s_count, ErrorCode::kConfig,
          "need one utility per source");
  for (const auto& u : utilities) {
    Require(std::isfinite(u.weight) && u.weight >= 0.0, ErrorCode::kConfig,
            "utility weights must be nonnegative");
  }
  Require(x_max.size() == k_count && y_max.size() == s_count, ErrorCode::kConfig,
          "rate bounds have wrong length");
  Require((x_max.array() > 0.0).all() && (y_max.array() > 0.0).all() &&
              x_max.allFinite() && y_max.allFinite(),
          ErrorCode::kConfig, "rate bounds must be positive");

  NumProblem p;
  p.a = Matrix::Zero(l_count + s_count, k_count + s_count);
  p.a.topLeftCorner(l_count, k_count) = topology.RoutingMatrix();
  p.a.bottomLeftCorner(s_count, k_count) = -topology.SourceMatrix();
  p.a.bottomRightCorner(s_count, s_count) = Matrix::Identity(s_count, s_count);
  p.b = Vector::Zero(l_count + s_count);
  p.b.head(l_count) = topology.capacity;
  p.topology = std::move(topology);
  p.utilities = std::move(utilities);
  p.x_max = std::move(x_max);
  p.y_max = std::move(y_max);
  return p;
}

ConvexProgram BuildNumProgram(const NumProblem& problem, std::string name) {
  const int k_count = problem.topology.num_paths;
  const int s_count = problem.topology.num_sources;
  std::vector<ScalarTerm> objective(k_count + s_count);
  for (int s = 0; s < s_count; ++s) {
    objective[k_count + s].neg_log = problem.utilities[s].weight;
  }
  Vector lo = Vector::Zero(k_count + s_count);
  Vector hi(k_count + s_count);
  hi << problem.x_max, problem.y_max;
  const double beta = SpectralNorm(problem.a).value;
  return ConvexProgram::FromLinear(std::move(name), BoxSet::Make(lo, hi),
                                   std::move(objective), problem.a, problem.b,
                                   beta)
      .WithSense(Sense::kMaximize);
}

BetaBounds ComputeBetaBounds(const Topology& topology) {
  const double s = topology.num_sources;
  const double k = topology.num_paths;
  const double l = topology.num_links;
  BetaBounds out;
  out.hop_bound = std::sqrt(s + k + topology.total_hops());
  out.loose_bound = std::sqrt((l + 1.0) * k + s);
  return out;
}

namespace {

struct PriceMessage {
  int link = 0;
  int path = 0;
  double price = 0.0;
};

struct RateMessage {
  int path = 0;
  double rate = 0.0;
};

struct LinkAgent {
  double capacity = 0.0;
  std::vector<int> paths;
  double queue = 0.0;
  double load = 0.0;  // sum of the latest rates on this link
  double price = 0.0;
  std::vector<RateMessage> inbox;
};

struct SourceAgent {
  double weight = 0.0;
  double y_max = 0.0;
  std::vector<int> paths;
  Vector x;      // rates of own paths, in `paths` order
  Vector x_max;
  double y = 0.0;
  double queue = 0.0;
  double price = 0.0;
  std::vector<PriceMessage> inbox;
};

double QueueRule(double q, double g) { return std::max(-g, q + g); }

// Agents use the same tolerance as the centralized weight check.
double CheckedPrice(double w, const char* who, int index) {
  if (w < -1e-9) {
    throw Error(ErrorCode::kNumerical,
                std::string(who) + " " + std::to_string(index) +
                    " computed a negative price " + std::to_string(w));
  }
  return std::max(w, 0.0);
}

}  // namespace

SimulationResult SimulateDecentralized(const NumProblem& problem,
                                       const SimulationOptions& options) {
  const Topology& topo = problem.topology;
  const int l_count = topo.num_links;
  const int k_count = topo.num_paths;
  const int s_count = topo.num_sources;
  Require(options.alpha > 0.0, ErrorCode::kInvalidArgument, "alpha must be positive");
  Require(options.iterations >= 1, ErrorCode::kInvalidArgument,
          "iteration count must be at least 1");
  Vector x0 = options.x_init.size() ? options.x_init : Vector::Zero(k_count);
  Vector y0 = options.y_init.size() ? options.y_init : Vector::Zero(s_count);
  Require(x0.size() == k_count && y0.size() == s_count,
          ErrorCode::kInvalidArgument, "initial rates have wrong length");
  Require((x0.array() >= 0.0).all() && (x0.array() <= problem.x_max.array()).all() &&
              (y0.array() >= 0.0).all() && (y0.array() <= problem.y_max.array()).all(),
          ErrorCode::kInvalidArgument, "initial rates must lie in the box");

  const auto start = std::chrono::steady_clock::now();
  const double alpha = options.alpha;
  const ConvexProgram program = BuildNumProgram(problem);

  // Initialization block: Q_l(0) = max{0, c_l - sum x_k(-1)}, likewise R_s(0).
  std::vector<LinkAgent> links(l_count);
  for (int l = 0; l < l_count; ++l) {
    LinkAgent& a = links[l];
    a.capacity = topo.capacity[l];
    a.paths = topo.link_paths[l];
    for (int k : a.paths) a.load += x0[k];
    a.queue = std::max(0.0, -(a.load - a.capacity));
  }
  std::vector<SourceAgent> sources(s_count);
  for (int s = 0; s < s_count; ++s) {
    SourceAgent& a = sources[s];
    a.weight = problem.utilities[s].weight;
    a.y_max = problem.y_max[s];
    a.paths = topo.source_paths[s];
    a.x.resize(a.paths.size());
    a.x_max.resize(a.paths.size());
    for (std::size_t j = 0; j < a.paths.size(); ++j) {
      a.x[j] = x0[a.paths[j]];
      a.x_max[j] = problem.x_max[a.paths[j]];
    }
    a.y = y0[s];
    a.queue = std::max(0.0, -(a.y - a.x.sum()));
  }
  std::vector<int> local_index(k_count, 0);
  for (int s = 0; s < s_count; ++s) {
    for (std::size_t j = 0; j < sources[s].paths.size(); ++j) {
      local_index[sources[s].paths[j]] = static_cast<int>(j);
    }
  }

  std::vector<int> link_order(l_count), source_order(s_count);
  std::iota(link_order.begin(), link_order.end(), 0);
  std::iota(source_order.begin(), source_order.end(), 0);
  std::mt19937_64 rng(options.shuffle_seed.value_or(0));

  auto gather = [&](Vector& z, Vector& q) {
    for (int s = 0; s < s_count; ++s) {
      for (std::size_t j = 0; j < sources[s].paths.size(); ++j) {
        z[sources[s].paths[j]] = sources[s].x[j];
      }
      z[k_count + s] = sources[s].y;
      q[l_count + s] = sources[s].queue;
    }
    for (int l = 0; l < l_count; ++l) q[l] = links[l].queue;
  };

  SimulationResult result;
  RunReport& report = result.report;
  report.config.problem = program.name();
  report.config.algorithm = "vq-decentralized";
  report.config.alpha = alpha;
  report.config.iterations = options.iterations;
  report.config.record_every = options.record_every > 0
                                   ? options.record_every
                                   : DefaultRecordEvery(options.iterations);
  report.config.modes.assign(l_count + s_count, ConstraintMode::kInequality);
  report.config.oracle = "closed-form";
  Vector z_init(k_count + s_count);
  z_init << x0, y0;
  report.config.x_init = z_init;
  report.config.beta = program.beta_hint();
  report.warnings = AlphaWarnings(alpha, program.beta_hint());
  TraceRecorder recorder(program, report, report.config.modes, /*queue_checks=*/true);

  const int m = l_count + s_count;
  Vector z = z_init;
  Vector queues(m);
  gather(z, queues);
  Vector g_prev = program.Constraints(z);
  Vector x_bar, g_sum = Vector::Zero(m);
  Vector before(m);

  for (std::int64_t t = 0; t < options.iterations; ++t) {
    recorder.CheckState(t, queues, g_prev);
    before = queues;
    try {
      if (options.shuffle_seed) {
        std::shuffle(link_order.begin(), link_order.end(), rng);
        std::shuffle(source_order.begin(), source_order.end(), rng);
      }
      // Links publish Y_l(t) = Q_l(t) + sum_{k in D_l} x_k(t-1) - c_l.
      for (int l : link_order) {
        LinkAgent& a = links[l];
        a.price = CheckedPrice(a.queue + (a.load - a.capacity), "link", l);
        for (int k : a.paths) {
          sources[topo.path_source[k]].inbox.push_back({l, k, a.price});
          ++result.messages.price_messages;
        }
      }
      // Sources update x, y and R, then publish x(t).
      for (int s : source_order) {
        SourceAgent& a = sources[s];
        a.price = CheckedPrice(a.queue + (a.y - a.x.sum()), "source", s);
        std::sort(a.inbox.begin(), a.inbox.end(),
                  [](const PriceMessage& p, const PriceMessage& q) {
                    return p.link < q.link;
                  });
        Vector path_price = Vector::Zero(a.paths.size());
        for (const PriceMessage& msg : a.inbox) {
          path_price[local_index[msg.path]] += msg.price;
        }
        a.inbox.clear();
        for (Eigen::Index j = 0; j < a.x.size(); ++j) {
          a.x[j] = SolveSeparableQuadratic(
              alpha, (path_price[j] - a.price) - 2.0 * alpha * a.x[j], 0.0,
              a.x_max[j]);
        }
        ScalarTerm term{alpha, a.price - 2.0 * alpha * a.y, a.weight, 0.0};
        a.y = MinimizeScalarTerm(term, 0.0, a.y_max);
        a.queue = QueueRule(a.queue, a.y - a.x.sum());
        for (Eigen::Index j = 0; j < a.x.size(); ++j) {
          const int k = a.paths[j];
          for (int l : topo.path_links[k]) {
            links[l].inbox.push_back({k, a.x[j]});
            ++result.messages.rate_messages;
          }
        }
      }
      // Links fold the new rates into Q_l(t+1).
      for (int l : link_order) {
        LinkAgent& a = links[l];
        std::sort(a.inbox.begin(), a.inbox.end(),
                  [](const RateMessage& p, const RateMessage& q) {
                    return p.path < q.path;
                  });
        a.load = 0.0;
        for (const RateMessage& msg : a.inbox) a.load += msg.rate;
        a.inbox.clear();
        a.queue = QueueRule(a.queue, a.load - a.capacity);
      }
    } catch (const Error& e) {
      report.failure = RunFailure{e.code(), t,
                                  "round " + std::to_string(t) + ": " + e.what()};
      break;
    }
    ++result.messages.rounds;

    gather(z, queues);
    g_prev = program.Constraints(z);
    if (t == 0) {
      x_bar = z;
    } else {
      const double td = static_cast<double>(t);
      x_bar = x_bar * (td / (td + 1.0)) + z * (1.0 / (td + 1.0));
    }
    g_sum += g_prev;
    recorder.OnStep(t + 1, z, g_prev, g_prev, before, queues, x_bar, g_sum);
    report.completed_iterations = t + 1;
  }
  if (report.ok()) recorder.CheckState(report.completed_iterations, queues, g_prev);

  result.links.resize(l_count);
  for (int l = 0; l < l_count; ++l) {
    result.links[l] = {links[l].queue, links[l].price};
  }
  result.sources.resize(s_count);
  for (int s = 0; s < s_count; ++s) {
    result.sources[s] = {sources[s].queue, sources[s].price, sources[s].y};
  }
  result.path_rates = z.head(k_count);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace qpush
