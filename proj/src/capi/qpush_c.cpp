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

#include "qpush/qpush.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <utility>

#include "core/analysis.hpp"
#include "core/baseline.hpp"
#include "core/bounds.hpp"
#include "core/netflow.hpp"
#include "core/problem_io.hpp"
#include "core/problems.hpp"
#include "core/solver.hpp"

struct qpush_problem {
  qpush::NamedProblem named;
};

struct qpush_report {
  qpush::RunReport report;
  qpush::MessageStats messages;
  bool maximize = false;
  std::string failure;
};

struct qpush_bounds {
  qpush::BoundReport bounds;
};

namespace {

using qpush::ErrorCode;

thread_local std::string g_last_error;

qpush_status FromCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return QPUSH_ERR_INVALID_ARGUMENT;
    case ErrorCode::kConfig:
      return QPUSH_ERR_CONFIG;
    case ErrorCode::kNumerical:
    case ErrorCode::kNonConvergence:
      return QPUSH_ERR_NUMERICAL;
    case ErrorCode::kIo:
      return QPUSH_ERR_IO;
  }
  return QPUSH_ERR_INTERNAL;
}

qpush_status Fail(qpush_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
qpush_status Guard(F&& body) {
  try {
    return body();
  } catch (const qpush::Error& e) {
    return Fail(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(QPUSH_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(QPUSH_ERR_INTERNAL, e.what());
  }
}

#define QPUSH_REQUIRE_ARG(cond)                                          \
  do {                                                                   \
    if (!(cond)) return Fail(QPUSH_ERR_INVALID_ARGUMENT, #cond " failed"); \
  } while (0)

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qpush::Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw qpush::Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

qpush::NamedProblem FromNum(qpush::NumProblem num, std::string name) {
  qpush::ConvexProgram program = qpush::BuildNumProgram(num, name);
  qpush::NamedProblem named(std::move(name), program,
                            qpush::Vector::Zero(program.dim()));
  named.num = std::move(num);
  if (auto beta = program.beta_hint()) named.default_alpha = 0.5 * *beta * *beta + 1.0;
  return named;
}

qpush_status SlopeOut(const qpush::SlopeResult& s, double* slope, int* status) {
  if (slope) *slope = s.status == qpush::SlopeStatus::kOk
                          ? s.slope
                          : std::numeric_limits<double>::quiet_NaN();
  if (status) *status = static_cast<int>(s.status);
  return QPUSH_OK;
}

}  // namespace

extern "C" {

const char* qpush_last_error(void) { return g_last_error.c_str(); }

const char* qpush_version(void) { return "0.1.0"; }

const char* qpush_status_name(qpush_status status) {
  switch (status) {
    case QPUSH_OK:
      return "ok";
    case QPUSH_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case QPUSH_ERR_CONFIG:
      return "configuration error";
    case QPUSH_ERR_NUMERICAL:
      return "numerical failure";
    case QPUSH_ERR_BOUND_VIOLATION:
      return "bound violation";
    case QPUSH_ERR_IO:
      return "i/o error";
    case QPUSH_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown";
}

qpush_status qpush_problem_create_named(const char* id, uint64_t seed,
                                        qpush_problem** out) {
  QPUSH_REQUIRE_ARG(id != nullptr && out != nullptr);
  *out = nullptr;
  return Guard([&] {
    *out = new qpush_problem{qpush::MakeNamedProblem(id, seed)};
    return QPUSH_OK;
  });
}

qpush_status qpush_problem_load_json(const char* path, qpush_problem** out) {
  QPUSH_REQUIRE_ARG(path != nullptr && out != nullptr);
  *out = nullptr;
  return Guard([&] {
    qpush::ConvexProgram program = qpush::LoadProblemFile(path);
    qpush::NamedProblem named(program.name(), program,
                              qpush::ClampToBox(qpush::Vector::Zero(program.dim()),
                                                program.box()));
    if (auto beta = program.beta_hint()) named.default_alpha = 0.5 * *beta * *beta + 1.0;
    *out = new qpush_problem{std::move(named)};
    return QPUSH_OK;
  });
}

qpush_status qpush_problem_load_topology(const char* path, qpush_problem** out) {
  QPUSH_REQUIRE_ARG(path != nullptr && out != nullptr);
  *out = nullptr;
  return Guard([&] {
    *out = new qpush_problem{FromNum(qpush::LoadTopologyFile(path), "topology")};
    return QPUSH_OK;
  });
}

void qpush_problem_destroy(qpush_problem* problem) { delete problem; }

qpush_status qpush_problem_info_get(const qpush_problem* problem,
                                    qpush_problem_info* out) {
  QPUSH_REQUIRE_ARG(problem != nullptr && out != nullptr);
  return Guard([&] {
    const qpush::NamedProblem& np = problem->named;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    qpush_problem_info info{};
    info.name = np.program.name().c_str();
    info.n = np.program.dim();
    info.m = np.program.num_constraints();
    info.maximize = np.program.sense() == qpush::Sense::kMaximize;
    auto beta = np.program.beta_hint();
    info.has_beta = beta.has_value();
    info.beta = beta.value_or(nan);
    info.has_optimum = np.optimum.has_value();
    info.optimum = np.optimum.value_or(nan);
    info.has_published_value = np.published_value.has_value();
    info.published_value = np.published_value.value_or(nan);
    info.default_alpha = np.default_alpha;
    info.is_network = np.num.has_value();
    info.hop_bound = nan;
    info.loose_bound = nan;
    if (np.num) {
      qpush::BetaBounds b = qpush::ComputeBetaBounds(np.num->topology);
      info.hop_bound = b.hop_bound;
      info.loose_bound = b.loose_bound;
    }
    const qpush::LinearConstraints* lin = np.program.linear();
    info.frobenius = lin ? qpush::FrobeniusBound(lin->a) : nan;
    *out = info;
    return QPUSH_OK;
  });
}

qpush_status qpush_problem_evaluate(const qpush_problem* problem, const double* x,
                                    size_t n, double* f, double* g, size_t m) {
  QPUSH_REQUIRE_ARG(problem != nullptr && x != nullptr);
  const qpush::ConvexProgram& p = problem->named.program;
  QPUSH_REQUIRE_ARG(n == static_cast<size_t>(p.dim()));
  QPUSH_REQUIRE_ARG(g == nullptr || m == static_cast<size_t>(p.num_constraints()));
  return Guard([&] {
    qpush::Evaluation e =
        qpush::Evaluate(p, Eigen::Map<const qpush::Vector>(x, static_cast<Eigen::Index>(n)));
    if (f) *f = e.f;
    if (g) {
      for (size_t k = 0; k < m; ++k) g[k] = e.g[static_cast<Eigen::Index>(k)];
    }
    return QPUSH_OK;
  });
}

qpush_status qpush_spectral_norm(const double* a, size_t rows, size_t cols,
                                 double* out) {
  QPUSH_REQUIRE_ARG(out != nullptr && (a != nullptr || rows * cols == 0));
  return Guard([&] {
    qpush::Matrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
      for (size_t c = 0; c < cols; ++c) m(r, c) = a[r * cols + c];
    }
    *out = qpush::SpectralNorm(m).value;
    return QPUSH_OK;
  });
}

void qpush_run_options_init(qpush_run_options* options) {
  if (options == nullptr) return;
  *options = qpush_run_options{};
  options->algorithm = QPUSH_ALGO_VQ;
  options->alpha = 0.0;
  options->gamma = 0.01;
  options->iterations = 1000;
  options->record_every = 0;
}

qpush_status qpush_run(const qpush_problem* problem, const qpush_run_options* options,
                       qpush_report** out) {
  QPUSH_REQUIRE_ARG(problem != nullptr && options != nullptr && out != nullptr);
  *out = nullptr;
  return Guard([&] {
    const qpush::NamedProblem& np = problem->named;
    qpush::Vector x_init = np.x_init;
    if (options->x_init != nullptr) {
      x_init = Eigen::Map<const qpush::Vector>(
          options->x_init, static_cast<Eigen::Index>(options->x_init_len));
      qpush::Require(x_init.size() == np.program.dim(),
                     ErrorCode::kInvalidArgument, "x_init has wrong length");
    }
    const double alpha = options->alpha > 0.0 ? options->alpha : np.default_alpha;
    auto rep = std::make_unique<qpush_report>();
    rep->maximize = np.program.sense() == qpush::Sense::kMaximize;
    switch (options->algorithm) {
      case QPUSH_ALGO_VQ: {
        qpush::SolverOptions so;
        so.alpha = alpha;
        so.iterations = options->iterations;
        so.record_every = options->record_every;
        rep->report = qpush::Run(np.program, x_init, so);
        break;
      }
      case QPUSH_ALGO_DSG:
        rep->report = qpush::DsgRun(np.program, options->gamma, options->iterations,
                                    options->record_every);
        break;
      case QPUSH_ALGO_VQ_DECENTRALIZED: {
        qpush::Require(np.num.has_value(), ErrorCode::kConfig,
                       "decentralized runs need a network problem");
        const int k = np.num->topology.num_paths;
        qpush::SimulationOptions so;
        so.alpha = alpha;
        so.iterations = options->iterations;
        so.record_every = options->record_every;
        so.x_init = x_init.head(k);
        so.y_init = x_init.tail(x_init.size() - k);
        qpush::SimulationResult sim = qpush::SimulateDecentralized(*np.num, so);
        rep->report = std::move(sim.report);
        rep->messages = sim.messages;
        break;
      }
      default:
        throw qpush::Error(ErrorCode::kInvalidArgument, "unknown algorithm");
    }
    rep->report.config.problem = np.id;
    qpush_status status = QPUSH_OK;
    if (rep->report.failure) {
      rep->failure = rep->report.failure->message;
      status = Fail(FromCode(rep->report.failure->code), rep->failure);
    }
    *out = rep.release();
    return status;
  });
}

void qpush_report_destroy(qpush_report* report) { delete report; }

qpush_status qpush_report_summary_get(const qpush_report* report,
                                      qpush_report_summary* out) {
  QPUSH_REQUIRE_ARG(report != nullptr && out != nullptr);
  return Guard([&] {
    const qpush::RunReport& r = report->report;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    qpush_report_summary s{};
    s.iterations = r.config.iterations;
    s.completed_iterations = r.completed_iterations;
    s.rows = r.rows.size();
    s.f_xbar = nan;
    s.native_value = nan;
    s.max_violation = nan;
    s.queue_norm = nan;
    if (!r.rows.empty()) {
      const qpush::TraceRow& last = r.rows.back();
      s.f_xbar = last.f_xbar;
      s.native_value = report->maximize ? -last.f_xbar : last.f_xbar;
      s.max_violation =
          last.g_xbar.size() ? std::max(0.0, last.g_xbar.maxCoeff()) : 0.0;
      s.queue_norm = last.queues.norm();
    }
    s.alpha = r.config.alpha;
    s.gamma = r.config.gamma;
    s.has_beta = r.config.beta.has_value();
    s.beta = r.config.beta.value_or(nan);
    s.wall_seconds = r.wall_seconds;
    s.invariant_checks = r.invariants.steps_checked;
    s.invariant_failures = r.invariants.total_failures();
    s.failed = r.failure.has_value();
    s.num_warnings = r.warnings.size();
    s.price_messages = report->messages.price_messages;
    s.rate_messages = report->messages.rate_messages;
    *out = s;
    return QPUSH_OK;
  });
}

const char* qpush_report_algorithm(const qpush_report* report) {
  return report ? report->report.config.algorithm.c_str() : nullptr;
}

const char* qpush_report_oracle(const qpush_report* report) {
  return report ? report->report.config.oracle.c_str() : nullptr;
}

const char* qpush_report_warning(const qpush_report* report, size_t i) {
  if (report == nullptr || i >= report->report.warnings.size()) return nullptr;
  return report->report.warnings[i].c_str();
}

const char* qpush_report_failure(const qpush_report* report) {
  if (report == nullptr || !report->report.failure) return nullptr;
  return report->failure.c_str();
}

qpush_status qpush_report_row(const qpush_report* report, size_t i,
                              qpush_trace_row* out) {
  QPUSH_REQUIRE_ARG(report != nullptr && out != nullptr);
  QPUSH_REQUIRE_ARG(i < report->report.rows.size());
  const qpush::TraceRow& row = report->report.rows[i];
  out->t = row.t;
  out->f_xbar = row.f_xbar;
  out->max_violation = row.g_xbar.size() ? std::max(0.0, row.g_xbar.maxCoeff()) : 0.0;
  out->queue_norm = row.queues.norm();
  out->drift = row.drift.delta;
  out->drift_bound = row.drift.bound;
  return QPUSH_OK;
}

qpush_status qpush_report_x_bar(const qpush_report* report, double* out, size_t n) {
  QPUSH_REQUIRE_ARG(report != nullptr && out != nullptr && !report->report.rows.empty());
  const qpush::Vector& v = report->report.rows.back().x_bar;
  QPUSH_REQUIRE_ARG(n == static_cast<size_t>(v.size()));
  for (size_t i = 0; i < n; ++i) out[i] = v[static_cast<Eigen::Index>(i)];
  return QPUSH_OK;
}

qpush_status qpush_report_queues(const qpush_report* report, double* out, size_t m) {
  QPUSH_REQUIRE_ARG(report != nullptr && !report->report.rows.empty());
  const qpush::Vector& v = report->report.rows.back().queues;
  QPUSH_REQUIRE_ARG(m == static_cast<size_t>(v.size()) && (out != nullptr || m == 0));
  for (size_t i = 0; i < m; ++i) out[i] = v[static_cast<Eigen::Index>(i)];
  return QPUSH_OK;
}

qpush_status qpush_report_write_csv(const qpush_report* report,
                                    const qpush_bounds* bounds, const char* path) {
  QPUSH_REQUIRE_ARG(report != nullptr && path != nullptr);
  return Guard([&] {
    WriteFile(path, qpush::WriteTraceCsv(qpush::BuildTraceTable(
                        report->report, bounds ? &bounds->bounds : nullptr)));
    return QPUSH_OK;
  });
}

qpush_status qpush_report_write_full_csv(const qpush_report* report, const char* path) {
  QPUSH_REQUIRE_ARG(report != nullptr && path != nullptr);
  return Guard([&] {
    WriteFile(path, qpush::WriteFullTraceCsv(report->report));
    return QPUSH_OK;
  });
}

qpush_status qpush_report_slope(const qpush_report* report, double f_star_min,
                                double t_lo, double t_hi, double* slope,
                                int* slope_status) {
  QPUSH_REQUIRE_ARG(report != nullptr);
  return Guard([&] {
    return SlopeOut(qpush::SlopeCheck(qpush::BuildTraceTable(report->report),
                                      f_star_min, t_lo, t_hi),
                    slope, slope_status);
  });
}

qpush_status qpush_csv_slope(const char* trace_csv_path, double f_star_min, double t_lo,
                             double t_hi, double* slope, int* slope_status) {
  QPUSH_REQUIRE_ARG(trace_csv_path != nullptr);
  return Guard([&] {
    auto rows = qpush::ReadTraceCsv(qpush::ReadTextFile(trace_csv_path));
    return SlopeOut(qpush::SlopeCheck(rows, f_star_min, t_lo, t_hi), slope,
                    slope_status);
  });
}

qpush_status qpush_verify_bounds(const qpush_problem* problem,
                                 const qpush_report* report,
                                 const char* reference_path, double slack,
                                 qpush_bounds** out) {
  QPUSH_REQUIRE_ARG(problem != nullptr && report != nullptr &&
                    reference_path != nullptr && out != nullptr);
  *out = nullptr;
  return Guard([&] {
    qpush::ReferenceSolution ref = qpush::LoadReferenceFile(reference_path);
    auto b = std::make_unique<qpush_bounds>();
    b->bounds = qpush::VerifyBounds(report->report, problem->named.program, ref, slack);
    const bool passed = b->bounds.passed();
    *out = b.release();
    return passed ? QPUSH_OK
                  : Fail(QPUSH_ERR_BOUND_VIOLATION, "one or more bounds violated");
  });
}

void qpush_bounds_destroy(qpush_bounds* bounds) { delete bounds; }

qpush_status qpush_bounds_check(const qpush_bounds* bounds, int i,
                                qpush_bound_check* out) {
  QPUSH_REQUIRE_ARG(bounds != nullptr && out != nullptr && i >= 0 && i < 4);
  const qpush::BoundCheck& c = bounds->bounds.check(i);
  out->name = c.name.c_str();
  out->status = static_cast<qpush_bound_status>(c.status);
  out->checked = c.checked;
  out->violations = c.violations;
  out->first_violation_t = c.first_violation_t;
  out->worst_margin = c.worst_margin;
  out->note = c.note.c_str();
  return QPUSH_OK;
}

qpush_status qpush_bounds_constants(const qpush_bounds* bounds,
                                    double* objective_constant,
                                    double* queue_constant) {
  QPUSH_REQUIRE_ARG(bounds != nullptr);
  if (objective_constant) *objective_constant = bounds->bounds.objective_constant;
  if (queue_constant) {
    *queue_constant = bounds->bounds.queue_constant.value_or(
        std::numeric_limits<double>::quiet_NaN());
  }
  return QPUSH_OK;
}

qpush_status qpush_bounds_write_csv(const qpush_bounds* bounds, const char* path) {
  QPUSH_REQUIRE_ARG(bounds != nullptr && path != nullptr);
  return Guard([&] {
    WriteFile(path, qpush::WriteBoundsCsv(bounds->bounds));
    return QPUSH_OK;
  });
}

qpush_status qpush_plot_svg(const char* trace_csv_path, const char* svg_path,
                            const char* title, double f_star_min) {
  QPUSH_REQUIRE_ARG(trace_csv_path != nullptr && svg_path != nullptr);
  return Guard([&] {
    auto rows = qpush::ReadTraceCsv(qpush::ReadTextFile(trace_csv_path));
    qpush::PlotOptions opt;
    if (title) opt.title = title;
    if (!std::isnan(f_star_min)) opt.f_star = f_star_min;
    WriteFile(svg_path, qpush::PlotSvg(rows, opt));
    return QPUSH_OK;
  });
}

}  // extern "C"
