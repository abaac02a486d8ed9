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
#include <vector>

#include "core/bounds.hpp"
#include "core/trace.hpp"

namespace qpush {

// One CSV line per recorded row. f_xbar is in the minimized sense,
// max_violation = max{0, max_k g_k(x_bar)}, residuals are lhs - rhs of the
// objective and constraint bounds (NaN when unavailable).
struct TraceCsvRow {
  std::int64_t t = 0;
  double f_xbar = 0.0;
  double max_violation = 0.0;
  double queue_norm = 0.0;
  double drift = 0.0;
  double drift_bound = 0.0;
  double obj_bound_residual = 0.0;
  double cons_bound_residual = 0.0;

  bool operator==(const TraceCsvRow& other) const;
};

inline constexpr const char* kTraceCsvHeader =
    "t,f_xbar,max_violation,queue_norm,drift,drift_bound,obj_bound_residual,"
    "cons_bound_residual";

std::vector<TraceCsvRow> BuildTraceTable(const RunReport& report,
                                         const BoundReport* bounds = nullptr);

// Shortest round-trip formatting; "nan" and "inf" for non-finite values.
std::string FormatDouble(double v);

std::string WriteTraceCsv(const std::vector<TraceCsvRow>& rows);
std::vector<TraceCsvRow> ReadTraceCsv(const std::string& text);

// t, x_bar_*, x_*, queue_* columns for every recorded row.
std::string WriteFullTraceCsv(const RunReport& report);

std::string WriteBoundsCsv(const BoundReport& bounds);

enum class SlopeStatus { kOk, kBelowFloor, kInsufficient };

struct SlopeResult {
  SlopeStatus status = SlopeStatus::kInsufficient;
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
  std::string note;
};

// Least-squares slope of log10(error) against log10(t) over t in [t_lo, t_hi].
SlopeResult FitLogLogSlope(const std::vector<double>& t,
                           const std::vector<double>& error, double t_lo,
                           double t_hi);
// error = |f_xbar - f_star| (minimized sense).
SlopeResult SlopeCheck(const std::vector<TraceCsvRow>& rows, double f_star,
                       double t_lo, double t_hi);

std::string_view SlopeStatusName(SlopeStatus status);

struct PlotOptions {
  std::string title = "convergence";
  std::optional<double> f_star;  // minimized sense
  int width = 760;
  int height = 500;
};

// Log-log plot of |f(x_bar) - f*|, max violation, a 1/t reference and the
// bound curves recovered from the residual columns. Depends only on `rows`.
std::string PlotSvg(const std::vector<TraceCsvRow>& rows, const PlotOptions& options);

}  // namespace qpush
