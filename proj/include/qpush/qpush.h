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

#ifndef QPUSH_QPUSH_H_
#define QPUSH_QPUSH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(QPUSH_BUILDING_LIBRARY)
#define QPUSH_API __attribute__((visibility("default")))
#else
#define QPUSH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qpush_status {
  QPUSH_OK = 0,
  QPUSH_ERR_INVALID_ARGUMENT = 1,
  QPUSH_ERR_CONFIG = 2,
  QPUSH_ERR_NUMERICAL = 3,
  QPUSH_ERR_BOUND_VIOLATION = 4,
  QPUSH_ERR_IO = 5,
  QPUSH_ERR_INTERNAL = 6
} qpush_status;

typedef struct qpush_problem qpush_problem;
typedef struct qpush_report qpush_report;
typedef struct qpush_bounds qpush_bounds;

/* Message for the last non-OK status on the calling thread. */
QPUSH_API const char* qpush_last_error(void);
QPUSH_API const char* qpush_version(void);
QPUSH_API const char* qpush_status_name(qpush_status status);

/* ---- problems ---------------------------------------------------------- */

/* "fig1-num", "fig1-flow-power" or "qp" (seeded). */
QPUSH_API qpush_status qpush_problem_create_named(const char* id, uint64_t seed,
                                                  qpush_problem** out);
/* Generic program file (see README for the schema). */
QPUSH_API qpush_status qpush_problem_load_json(const char* path, qpush_problem** out);
/* Network topology file; the result also supports decentralized runs. */
QPUSH_API qpush_status qpush_problem_load_topology(const char* path,
                                                   qpush_problem** out);
QPUSH_API void qpush_problem_destroy(qpush_problem* problem);

typedef struct qpush_problem_info {
  const char* name; /* owned by the problem */
  int n;
  int m;
  int maximize;  /* native sense; the solver always minimizes */
  int has_beta;
  double beta;
  int has_optimum; /* native sense */
  double optimum;
  int has_published_value;
  double published_value;
  double default_alpha;
  int is_network;
  double hop_bound;   /* network only */
  double loose_bound; /* network only */
  double frobenius;   /* linear constraints only, else NaN */
} qpush_problem_info;

QPUSH_API qpush_status qpush_problem_info_get(const qpush_problem* problem,
                                              qpush_problem_info* out);
/* f and g (length m) at x (length n); minimized sense. */
QPUSH_API qpush_status qpush_problem_evaluate(const qpush_problem* problem,
                                              const double* x, size_t n, double* f,
                                              double* g, size_t m);

/* Largest singular value of a row-major rows x cols matrix. */
QPUSH_API qpush_status qpush_spectral_norm(const double* a, size_t rows, size_t cols,
                                           double* out);

/* ---- runs -------------------------------------------------------------- */

typedef enum qpush_algorithm {
  QPUSH_ALGO_VQ = 0,
  QPUSH_ALGO_DSG = 1,
  QPUSH_ALGO_VQ_DECENTRALIZED = 2
} qpush_algorithm;

typedef struct qpush_run_options {
  qpush_algorithm algorithm;
  double alpha;         /* vq; <= 0 selects the problem default */
  double gamma;         /* dsg step size */
  int64_t iterations;
  int64_t record_every; /* 0 selects the default stride */
  const double* x_init; /* NULL selects the problem default */
  size_t x_init_len;
} qpush_run_options;

QPUSH_API void qpush_run_options_init(qpush_run_options* options);

/* On a solver failure mid-run *out still receives the partial report and
   the failure's status is returned. */
QPUSH_API qpush_status qpush_run(const qpush_problem* problem,
                                 const qpush_run_options* options, qpush_report** out);
QPUSH_API void qpush_report_destroy(qpush_report* report);

typedef struct qpush_report_summary {
  int64_t iterations;
  int64_t completed_iterations;
  size_t rows;
  double f_xbar;       /* minimized sense */
  double native_value; /* native sense */
  double max_violation;
  double queue_norm;
  double alpha;
  double gamma;
  int has_beta;
  double beta;
  double wall_seconds;
  int64_t invariant_checks;
  int64_t invariant_failures;
  int failed;
  size_t num_warnings;
  int64_t price_messages; /* decentralized only */
  int64_t rate_messages;
} qpush_report_summary;

QPUSH_API qpush_status qpush_report_summary_get(const qpush_report* report,
                                                qpush_report_summary* out);
QPUSH_API const char* qpush_report_algorithm(const qpush_report* report);
QPUSH_API const char* qpush_report_oracle(const qpush_report* report);
QPUSH_API const char* qpush_report_warning(const qpush_report* report, size_t i);
/* NULL when the run completed. */
QPUSH_API const char* qpush_report_failure(const qpush_report* report);

typedef struct qpush_trace_row {
  int64_t t;
  double f_xbar;
  double max_violation;
  double queue_norm;
  double drift;
  double drift_bound;
} qpush_trace_row;

QPUSH_API qpush_status qpush_report_row(const qpush_report* report, size_t i,
                                        qpush_trace_row* out);
/* Final running average (length n) and queues (length m). */
QPUSH_API qpush_status qpush_report_x_bar(const qpush_report* report, double* out,
                                          size_t n);
QPUSH_API qpush_status qpush_report_queues(const qpush_report* report, double* out,
                                           size_t m);

/* bounds may be NULL; residual columns are then NaN. */
QPUSH_API qpush_status qpush_report_write_csv(const qpush_report* report,
                                              const qpush_bounds* bounds,
                                              const char* path);
QPUSH_API qpush_status qpush_report_write_full_csv(const qpush_report* report,
                                                   const char* path);

/* Least-squares log10 slope of f(x_bar) - f_star over [t_lo, t_hi].
   slope_status: 0 ok, 1 converged below floor, 2 insufficient data. */
QPUSH_API qpush_status qpush_report_slope(const qpush_report* report,
                                          double f_star_min, double t_lo,
                                          double t_hi, double* slope,
                                          int* slope_status);
QPUSH_API qpush_status qpush_csv_slope(const char* trace_csv_path, double f_star_min,
                                       double t_lo, double t_hi, double* slope,
                                       int* slope_status);

/* ---- bounds ------------------------------------------------------------ */

/* Reference file: {"f_star", "x_star", "lambda_star", "beta"}, f_star in the
   minimized sense. Returns QPUSH_ERR_BOUND_VIOLATION when any check fails;
   *out is set either way. */
QPUSH_API qpush_status qpush_verify_bounds(const qpush_problem* problem,
                                           const qpush_report* report,
                                           const char* reference_path, double slack,
                                           qpush_bounds** out);
QPUSH_API void qpush_bounds_destroy(qpush_bounds* bounds);

typedef enum qpush_bound_status {
  QPUSH_BOUND_PASSED = 0,
  QPUSH_BOUND_FAILED = 1,
  QPUSH_BOUND_SKIPPED = 2
} qpush_bound_status;

typedef struct qpush_bound_check {
  const char* name; /* owned by the bounds handle */
  qpush_bound_status status;
  int64_t checked;
  int64_t violations;
  int64_t first_violation_t;
  double worst_margin;
  const char* note;
} qpush_bound_check;

/* i in 0..3: objective, constraint, queue_norm, queue_lower. */
QPUSH_API qpush_status qpush_bounds_check(const qpush_bounds* bounds, int i,
                                          qpush_bound_check* out);
/* queue_constant is NaN when alpha <= beta^2/2. */
QPUSH_API qpush_status qpush_bounds_constants(const qpush_bounds* bounds,
                                              double* objective_constant,
                                              double* queue_constant);
QPUSH_API qpush_status qpush_bounds_write_csv(const qpush_bounds* bounds,
                                              const char* path);

/* ---- plots ------------------------------------------------------------- */

/* Log-log SVG rendered from a trace CSV alone. f_star_min may be NaN. */
QPUSH_API qpush_status qpush_plot_svg(const char* trace_csv_path, const char* svg_path,
                                      const char* title, double f_star_min);

#ifdef __cplusplus
}
#endif

#endif  // QPUSH_QPUSH_H_
