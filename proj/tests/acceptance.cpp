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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/baseline.hpp"
#include "core/bounds.hpp"
#include "core/netflow.hpp"
#include "core/oracles.hpp"
#include "core/problem_io.hpp"
#include "core/problems.hpp"
#include "core/solver.hpp"
#include "support/reference.hpp"

namespace qpush {
namespace {

constexpr std::int64_t kLongRun = 100000;
// log(0.8) + 4 log(1.6): y = (0.8, 1.6, 1.6) with weights (1, 2, 2).
const double kFig1Exact = std::log(0.8) + 4.0 * std::log(1.6);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Shared long Fig-1 run; criteria 1, 4 and 7 read it.
struct Fig1Long {
  ConvexProgram program = MakeNamedProblem("fig1-num").program;
  RunReport report;
  double seconds = 0;

  Fig1Long() {
    SolverOptions o;
    o.alpha = kFig1Alpha;
    o.iterations = kLongRun;
    const auto start = std::chrono::steady_clock::now();
    report = Run(program, Vector::Zero(10), o);
    seconds = Seconds(start);
  }
};

const Fig1Long& Fig1() {
  static const Fig1Long run;
  return run;
}

Outcome Fig1Optimum() {
  const Fig1Long& r = Fig1();
  if (!r.report.ok()) return {false, r.report.failure->message};
  const double native = r.program.NativeValue(r.report.last().f_xbar);
  const double err = std::abs(native - kFig1Optimum);
  return {err <= 1e-3 && r.seconds <= 10.0,
          "f(x_bar(T)) = " + Fmt("%.9f", native) + ", |err| = " + Fmt("%.3e", err) +
              " (tol 1e-3), " + Fmt("%.2f", r.seconds) + " s (limit 10 s)"};
}

Outcome BetaValues() {
  const double fig1 = SpectralNorm(Fig1NumProblem().a).value;
  ConvexProgram fp = BuildFlowPowerProgram(Fig1FlowPowerProblem());
  const double pattern =
      SpectralNorm(DerivativeBoundMatrix(*fp.separable(), fp.box())).value;
  const bool pass = std::abs(fig1 - kFig1Beta) <= 1e-3 &&
                    std::abs(pattern - kFlowPowerBeta) <= 1e-3 &&
                    std::abs(*fp.beta_hint() - pattern) <= 1e-12;
  return {pass, "fig1 beta = " + Fmt("%.7f", fig1) + ", flow-power beta = " +
                    Fmt("%.7f", pattern) + " (tol 1e-3)"};
}

Outcome FlowPowerOptimum() {
  NamedProblem np = MakeNamedProblem("fig1-flow-power");
  SolverOptions o;
  o.alpha = kFig1Alpha;
  o.iterations = kLongRun;
  RunReport r = Run(np.program, Vector::Zero(np.program.dim()), o);
  if (!r.ok()) return {false, r.failure->message};
  const double native = np.program.NativeValue(r.last().f_xbar);
  const double err = std::abs(native - kFlowPowerOptimum);
  // Power levels stay clear of p_max, so the box does not cut the optimum.
  const Vector& xb = r.last().x_bar;
  const double p_top = xb.tail(9).maxCoeff();
  return {err <= 1e-3 && p_top < 10.0 - 0.1 && r.invariants.total_failures() == 0,
          "f(x_bar(T)) = " + Fmt("%.9f", native) + ", |err| = " + Fmt("%.3e", err) +
              " (tol 1e-3), max p_bar = " + Fmt("%.4f", p_top)};
}

Vector Fig1Gradient(const Vector& z) {
  Vector g = Vector::Zero(10);
  const double w[3] = {1, 2, 2};
  for (int s = 0; s < 3; ++s) g[7 + s] = -w[s] / z[7 + s];
  return g;
}

Outcome BoundSuite() {
  ReferenceSolution ref =
      LoadReferenceFile(std::string(QPUSH_DATA_DIR) + "/fig1_num_reference.json");
  NumProblem num = Fig1NumProblem();
  Vector hi(10);
  hi << num.x_max, num.y_max;
  const double kkt = testing::KktResidual(Fig1Gradient, num.a, num.b, Vector::Zero(10), hi,
                                          ref.x_star, ref.lambda_star);
  const double f_gap = std::abs(ref.f_star + kFig1Exact);
  const Fig1Long& r = Fig1();
  if (!r.report.ok()) return {false, r.report.failure->message};
  BoundReport b = VerifyBounds(r.report, r.program, ref, 1e-9);
  bool pass = kkt < 1e-8 && f_gap < 1e-12;
  std::string detail = "KKT residual " + Fmt("%.1e", kkt);
  for (int i = 0; i < 4; ++i) {
    const BoundCheck& c = b.check(i);
    const bool ok = c.status == BoundStatus::kPassed && c.violations == 0 &&
                    c.checked == static_cast<std::int64_t>(r.report.rows.size());
    pass = pass && ok;
    detail += "; " + c.name + " " + std::string(BoundStatusName(c.status)) + " (" +
              std::to_string(c.checked) + " rows, worst margin " +
              Fmt("%.3e", c.worst_margin) + ")";
  }
  pass = pass && r.report.rows.front().t == 1 && r.report.rows.back().t == kLongRun;
  return {pass, detail};
}

Outcome InvariantSuite() {
  std::mt19937_64 rng(20261016);
  std::int64_t failures = 0, checks = 0;
  int errors = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ConvexProgram p = testing::RandomSeparableProgram(rng, 20, 5);
    const BoxSet box = p.OracleBox();
    Vector x0(p.dim());
    for (int i = 0; i < p.dim(); ++i) x0[i] = testing::Uniform(rng, box.lo[i], box.hi[i]);
    SolverOptions o;
    o.alpha = testing::Uniform(rng, 0.2, 20.0);
    o.iterations = 500;
    RunReport r = Run(p, x0, o);
    if (!r.ok()) ++errors;
    failures += r.invariants.total_failures();
    checks += r.invariants.steps_checked;
  }
  return {failures == 0 && errors == 0,
          "200 programs, " + std::to_string(checks) + " steps checked, " +
              std::to_string(failures) + " invariant failures, " + std::to_string(errors) +
              " run errors"};
}

double TraceGap(const RunReport& a, const RunReport& b) {
  if (a.rows.size() != b.rows.size()) return INFINITY;
  double gap = 0.0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].t != b.rows[i].t) return INFINITY;
    gap = std::max({gap, (a.rows[i].x - b.rows[i].x).cwiseAbs().maxCoeff(),
                    (a.rows[i].queues - b.rows[i].queues).cwiseAbs().maxCoeff(),
                    (a.rows[i].x_bar - b.rows[i].x_bar).cwiseAbs().maxCoeff()});
  }
  return gap;
}

double EquivalenceGap(const NumProblem& num, double alpha) {
  SimulationOptions so;
  so.alpha = alpha;
  so.iterations = 1000;
  so.record_every = 1;
  SimulationResult sim = SimulateDecentralized(num, so);
  SolverOptions o;
  o.alpha = alpha;
  o.iterations = 1000;
  o.record_every = 1;
  RunReport central = Run(BuildNumProgram(num), Vector::Zero(num.a.cols()), o);
  if (!sim.report.ok() || !central.ok()) return INFINITY;
  return TraceGap(sim.report, central);
}

Outcome Decentralized() {
  double worst = EquivalenceGap(Fig1NumProblem(), kFig1Alpha);
  std::mt19937_64 rng(77);
  for (int i = 0; i < 25; ++i) {
    NumProblem num = testing::RandomNumProblem(rng, 8, 8);
    const double hop = ComputeBetaBounds(num.topology).hop_bound;
    worst = std::max(worst, EquivalenceGap(num, 0.5 * hop * hop + 1.0));
  }
  return {worst <= 1e-9, "max-abs gap " + Fmt("%.3e", worst) +
                             " over Fig-1 and 25 random topologies (tol 1e-9)"};
}

Outcome RateCheck() {
  const Fig1Long& r = Fig1();
  if (!r.report.ok()) return {false, r.report.failure->message};
  SlopeResult s = SlopeCheck(BuildTraceTable(r.report), -kFig1Exact, 1e2, 1e5);
  RunReport dsg = DsgRun(r.program, 0.01, kLongRun);
  if (!dsg.ok()) return {false, dsg.failure->message};
  const double vq_err = std::abs(r.report.last().f_xbar + kFig1Exact);
  const double dsg_err = std::abs(dsg.last().f_xbar + kFig1Exact);
  const bool pass = s.status == SlopeStatus::kOk && s.slope >= -1.15 && s.slope <= -0.85 &&
                    dsg_err > vq_err;
  return {pass, "slope " + Fmt("%.4f", s.slope) + " (" + std::string(SlopeStatusName(s.status)) +
                    ", window [-1.15, -0.85]); dsg error " + Fmt("%.3e", dsg_err) +
                    " vs vq error " + Fmt("%.3e", vq_err)};
}

Outcome QpReproduction() {
  NamedProblem np = MakeNamedProblem("qp", 1);
  testing::QpReference ref = testing::SolveQpByDualBisection(GenerateQp(1));
  SolverOptions o;
  o.alpha = np.default_alpha;
  o.iterations = kLongRun;
  RunReport r = Run(np.program, np.x_init, o);
  if (!r.ok()) return {false, r.failure->message};
  const double err = std::abs(r.last().f_xbar - ref.f_star);
  return {err <= 1e-4 && r.invariants.total_failures() == 0,
          "alpha " + Fmt("%.4f", o.alpha) + ", f(x_bar(T)) = " + Fmt("%.9f", r.last().f_xbar) +
              ", reference " + Fmt("%.9f", ref.f_star) + ", |err| = " + Fmt("%.3e", err) +
              " (tol 1e-4), " + std::to_string(r.invariants.total_failures()) +
              " invariant failures"};
}

// Random linear-constraint program whose subproblem has a closed form.
ConvexProgram RandomClosedFormProgram(std::mt19937_64& rng, Matrix& a) {
  const int n = testing::UniformInt(rng, 1, 12);
  const int m = testing::UniformInt(rng, 1, 5);
  std::vector<ScalarTerm> obj(n);
  Vector lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    switch (testing::UniformInt(rng, 0, 2)) {
      case 0:
        obj[i].lin = testing::Uniform(rng, -5, 5);
        break;
      case 1:
        obj[i].quad = testing::Uniform(rng, 0, 3);
        obj[i].lin = testing::Uniform(rng, -5, 5);
        break;
      default:
        obj[i].neg_log = testing::Uniform(rng, 0.1, 3);
        obj[i].lin = testing::Uniform(rng, -1, 1);
        break;
    }
    lo[i] = testing::UniformInt(rng, 0, 1) ? 0.0 : testing::Uniform(rng, 0, 1);
    hi[i] = lo[i] + testing::Uniform(rng, 0.5, 4);
  }
  a = Matrix::NullaryExpr(m, n, [&] { return testing::Uniform(rng, -2, 2); });
  Vector b = Vector::NullaryExpr(m, [&] { return testing::Uniform(rng, 0, 3); });
  return ConvexProgram::FromLinear("random-closed-form", BoxSet::Make(lo, hi), obj, a, b,
                                   testing::SvdNorm(a));
}

Outcome OracleCrossCheck() {
  std::mt19937_64 rng(909);
  double worst = 0.0;
  int off_route = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix a;
    ConvexProgram p = RandomClosedFormProgram(rng, a);
    if (RouteFor(p) != OracleRoute::kClosedForm) ++off_route;
    const BoxSet box = p.OracleBox();
    Subproblem sub;
    sub.program = &p;
    sub.weights = Vector::NullaryExpr(p.num_constraints(),
                                      [&] { return testing::Uniform(rng, 0, 4); });
    sub.x_prev = Vector::NullaryExpr(p.dim(), [&] { return testing::Uniform(rng, -1, 5); });
    sub.alpha = testing::Uniform(rng, 0.1, 10);
    for (int i = 0; i < p.dim(); ++i) {
      sub.x_prev[i] = std::clamp(sub.x_prev[i], box.lo[i], box.hi[i]);
    }
    const Vector closed = Dispatch(sub);
    const Vector pg = SolveProjectedGradient(sub);
    // Coordinatewise bisection on the derivative, assembled from A directly.
    const Vector lin_w = a.transpose() * sub.weights;
    const SeparableModel& sep = *p.separable();
    Vector bis(p.dim());
    for (int i = 0; i < p.dim(); ++i) {
      const ScalarTerm& f = sep.objective[i];
      const double xp = sub.x_prev[i];
      const double al = sub.alpha;
      auto deriv = [&](double x) {
        return f.Derivative(x) + lin_w[i] + 2.0 * al * (x - xp);
      };
      bis[i] = SolveScalarConvex(deriv, box.lo[i], box.hi[i]);
    }
    worst = std::max({worst, (closed - pg).cwiseAbs().maxCoeff(),
                      (closed - bis).cwiseAbs().maxCoeff(), (bis - pg).cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-6 && off_route == 0,
          "100 subproblems, max pairwise gap " + Fmt("%.3e", worst) + " (tol 1e-6), " +
              std::to_string(off_route) + " not routed to the closed form"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace qpush

int main() {
  using namespace qpush;
  const std::vector<Criterion> criteria = {
      {1, "fig1-num optimum", Fig1Optimum},
      {2, "beta spectral values", BetaValues},
      {3, "flow-power optimum", FlowPowerOptimum},
      {4, "bound suite", BoundSuite},
      {5, "invariant property suite", InvariantSuite},
      {6, "decentralized equivalence", Decentralized},
      {7, "rate check", RateCheck},
      {8, "qp reproduction", QpReproduction},
      {9, "subproblem oracle cross-validation", OracleCrossCheck},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
