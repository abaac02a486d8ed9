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

#include "core/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace qpush {

namespace {

std::vector<ConstraintMode> NormalizeModes(std::vector<ConstraintMode> modes,
                                           int m) {
  if (modes.empty()) return std::vector<ConstraintMode>(m, ConstraintMode::kInequality);
  Require(static_cast<int>(modes.size()) == m, ErrorCode::kInvalidArgument,
          "constraint mode count must equal the number of constraints");
  return modes;
}

// In-place step used by both Step() and Run(); returns Q(t) before update.
Vector Advance(SolverState& s, const ConvexProgram& program,
               const PrimalOracle& oracle) {
  const int m = program.num_constraints();
  Vector weights = s.queues + s.g_prev;
  for (int k = 0; k < m; ++k) {
    if (s.modes[k] == ConstraintMode::kInequality && weights[k] < -kInvariantTolerance) {
      throw Error(ErrorCode::kNumerical,
                  "negative subproblem weight " + std::to_string(weights[k]) +
                      " on inequality row " + std::to_string(k));
    }
    if (s.modes[k] == ConstraintMode::kInequality) weights[k] = std::max(weights[k], 0.0);
  }
  Subproblem sub{&program, std::move(weights), s.x_prev, s.alpha};
  Vector x = oracle ? oracle(sub) : Dispatch(sub);
  Require(x.size() == program.dim() && x.allFinite(), ErrorCode::kNumerical,
          "primal oracle returned an invalid iterate");
  x = ClampToBox(x, program.box());

  Vector g = program.Constraints(x);
  Require(g.allFinite(), ErrorCode::kNumerical, "constraint value not finite");
  Vector before = s.queues;
  s.queues = QueueUpdate(s.queues, g, s.modes);
  const double t = static_cast<double>(s.t);
  if (s.t == 0) {
    s.x_bar = x;
  } else {
    s.x_bar = s.x_bar * (t / (t + 1.0)) + x * (1.0 / (t + 1.0));
  }
  s.g_sum += g;
  s.x_prev = std::move(x);
  s.g_prev = std::move(g);
  ++s.t;
  return before;
}

}  // namespace

SolverState InitState(const ConvexProgram& program, const Vector& x_init,
                      double alpha, std::vector<ConstraintMode> modes) {
  Require(x_init.size() == program.dim(), ErrorCode::kInvalidArgument,
          "x_init dimension mismatch");
  Require(program.box().Contains(x_init), ErrorCode::kInvalidArgument,
          "x_init lies outside the box");
  Require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::kInvalidArgument,
          "alpha must be positive");
  SolverState s;
  s.alpha = alpha;
  s.modes = NormalizeModes(std::move(modes), program.num_constraints());
  s.x_prev = x_init;
  s.g_prev = program.Constraints(x_init);
  Require(s.g_prev.allFinite(), ErrorCode::kNumerical,
          "constraints are not finite at x_init");
  const int m = program.num_constraints();
  s.queues = Vector::Zero(m);
  for (int k = 0; k < m; ++k) {
    if (s.modes[k] == ConstraintMode::kInequality) {
      s.queues[k] = std::max(0.0, -s.g_prev[k]);
    }
  }
  s.g_sum = Vector::Zero(m);
  return s;
}

Vector QueueUpdate(const Vector& queues, const Vector& g_now,
                   const std::vector<ConstraintMode>& modes) {
  Require(queues.size() == g_now.size() &&
              static_cast<Eigen::Index>(modes.size()) == queues.size(),
          ErrorCode::kInvalidArgument, "queue update: length mismatch");
  Vector next(queues.size());
  for (Eigen::Index k = 0; k < queues.size(); ++k) {
    const double advanced = queues[k] + g_now[k];
    next[k] = modes[k] == ConstraintMode::kInequality
                  ? std::max(-g_now[k], advanced)
                  : advanced;
  }
  return next;
}

Vector QueueUpdate(const Vector& queues, const Vector& g_now,
                   ConstraintMode mode) {
  return QueueUpdate(queues, g_now,
                     std::vector<ConstraintMode>(queues.size(), mode));
}

SolverState Step(const SolverState& state, const ConvexProgram& program,
                 const PrimalOracle& oracle) {
  SolverState next = state;
  Advance(next, program, oracle);
  return next;
}

std::vector<std::string> AlphaWarnings(double alpha, std::optional<double> beta) {
  std::vector<std::string> out;
  if (!beta) {
    out.push_back("Lipschitz modulus unknown; alpha >= beta^2/2 cannot be verified");
    return out;
  }
  const double threshold = 0.5 * (*beta) * (*beta);
  std::ostringstream msg;
  if (alpha < threshold) {
    msg << "alpha " << alpha << " is below beta^2/2 = " << threshold
        << "; convergence guarantees do not apply";
    out.push_back(msg.str());
  } else if (alpha == threshold) {
    msg << "alpha equals beta^2/2 = " << threshold
        << "; constraint and queue bounds need strict inequality";
    out.push_back(msg.str());
  }
  return out;
}

RunReport Run(const ConvexProgram& program, const Vector& x_init,
              const SolverOptions& options) {
  Require(options.iterations >= 1, ErrorCode::kInvalidArgument,
          "iteration count must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  SolverState state = InitState(program, x_init, options.alpha, options.modes);

  RunReport report;
  report.config.problem = program.name();
  report.config.algorithm = "vq";
  report.config.alpha = options.alpha;
  report.config.iterations = options.iterations;
  report.config.record_every = options.record_every > 0
                                   ? options.record_every
                                   : DefaultRecordEvery(options.iterations);
  report.config.modes = state.modes;
  report.config.oracle = !options.oracle_id.empty()
                             ? options.oracle_id
                             : (options.oracle ? std::string("custom")
                                               : std::string(RouteName(RouteFor(program))));
  report.config.x_init = x_init;
  report.config.beta = program.beta_hint();
  report.warnings = AlphaWarnings(options.alpha, program.beta_hint());
  report.rows.reserve(static_cast<std::size_t>(
      options.iterations / report.config.record_every + 2));

  TraceRecorder recorder(program, report, state.modes, /*queue_checks=*/true);
  for (std::int64_t it = 0; it < options.iterations; ++it) {
    recorder.CheckState(state.t, state.queues, state.g_prev);
    try {
      Vector before = Advance(state, program, options.oracle);
      recorder.OnStep(state.t, state.x_prev, state.g_prev, state.g_prev, before,
                      state.queues, state.x_bar, state.g_sum);
    } catch (const Error& e) {
      report.failure = RunFailure{e.code(), it,
                                  "iteration " + std::to_string(it) + ": " + e.what()};
      break;
    }
    report.completed_iterations = state.t;
  }
  if (report.ok()) recorder.CheckState(state.t, state.queues, state.g_prev);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace qpush
