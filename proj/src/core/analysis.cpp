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

#include "core/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qpush {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool SameValue(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

double ParseDouble(std::string_view s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kConfig, "trace csv: bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

bool TraceCsvRow::operator==(const TraceCsvRow& o) const {
  return t == o.t && SameValue(f_xbar, o.f_xbar) &&
         SameValue(max_violation, o.max_violation) &&
         SameValue(queue_norm, o.queue_norm) && SameValue(drift, o.drift) &&
         SameValue(drift_bound, o.drift_bound) &&
         SameValue(obj_bound_residual, o.obj_bound_residual) &&
         SameValue(cons_bound_residual, o.cons_bound_residual);
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<TraceCsvRow> BuildTraceTable(const RunReport& report,
                                         const BoundReport* bounds) {
  std::vector<TraceCsvRow> out;
  out.reserve(report.rows.size());
  std::size_t b = 0;
  for (const TraceRow& row : report.rows) {
    TraceCsvRow r;
    r.t = row.t;
    r.f_xbar = row.f_xbar;
    r.max_violation = row.g_xbar.size() ? std::max(0.0, row.g_xbar.maxCoeff()) : 0.0;
    r.queue_norm = row.queues.norm();
    r.drift = row.drift.delta;
    r.drift_bound = row.drift.bound;
    r.obj_bound_residual = kNaN;
    r.cons_bound_residual = kNaN;
    if (bounds != nullptr) {
      while (b < bounds->rows.size() && bounds->rows[b].t < row.t) ++b;
      if (b < bounds->rows.size() && bounds->rows[b].t == row.t) {
        r.obj_bound_residual = bounds->rows[b].objective;
        r.cons_bound_residual = bounds->rows[b].constraint;
      }
    }
    out.push_back(r);
  }
  return out;
}

std::string WriteTraceCsv(const std::vector<TraceCsvRow>& rows) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const TraceCsvRow& r : rows) {
    out += std::to_string(r.t);
    for (double v : {r.f_xbar, r.max_violation, r.queue_norm, r.drift, r.drift_bound,
                     r.obj_bound_residual, r.cons_bound_residual}) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<TraceCsvRow> ReadTraceCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)) && line == kTraceCsvHeader,
          ErrorCode::kConfig, "trace csv: unexpected header");
  std::vector<TraceCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = SplitCommas(line);
    Require(f.size() == 8, ErrorCode::kConfig, "trace csv: expected 8 columns");
    TraceCsvRow r;
    std::int64_t t = 0;
    auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), t);
    Require(ec == std::errc() && ptr == f[0].data() + f[0].size(), ErrorCode::kConfig,
            "trace csv: bad iteration index");
    r.t = t;
    r.f_xbar = ParseDouble(f[1]);
    r.max_violation = ParseDouble(f[2]);
    r.queue_norm = ParseDouble(f[3]);
    r.drift = ParseDouble(f[4]);
    r.drift_bound = ParseDouble(f[5]);
    r.obj_bound_residual = ParseDouble(f[6]);
    r.cons_bound_residual = ParseDouble(f[7]);
    rows.push_back(r);
  }
  return rows;
}

std::string WriteFullTraceCsv(const RunReport& report) {
  std::string out = "t";
  if (report.rows.empty()) return out + '\n';
  const TraceRow& first = report.rows.front();
  for (Eigen::Index i = 0; i < first.x_bar.size(); ++i) out += ",x_bar_" + std::to_string(i);
  for (Eigen::Index i = 0; i < first.x.size(); ++i) out += ",x_" + std::to_string(i);
  for (Eigen::Index k = 0; k < first.queues.size(); ++k) out += ",queue_" + std::to_string(k);
  out += '\n';
  for (const TraceRow& row : report.rows) {
    out += std::to_string(row.t);
    for (const Vector* v : {&row.x_bar, &row.x, &row.queues}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        out += ',';
        out += FormatDouble((*v)[i]);
      }
    }
    out += '\n';
  }
  return out;
}

std::string WriteBoundsCsv(const BoundReport& bounds) {
  std::string out = "bound,status,checked,violations,first_violation_t,worst_margin,note\n";
  for (int i = 0; i < 4; ++i) {
    const BoundCheck& c = bounds.check(i);
    out += c.name + ',' + std::string(BoundStatusName(c.status)) + ',' +
           std::to_string(c.checked) + ',' + std::to_string(c.violations) + ',' +
           std::to_string(c.first_violation_t) + ',' + FormatDouble(c.worst_margin) +
           ',' + c.note + '\n';
  }
  return out;
}

std::string_view SlopeStatusName(SlopeStatus status) {
  switch (status) {
    case SlopeStatus::kOk:
      return "ok";
    case SlopeStatus::kBelowFloor:
      return "converged-below-floor";
    case SlopeStatus::kInsufficient:
      return "insufficient-data";
  }
  return "unknown";
}

SlopeResult FitLogLogSlope(const std::vector<double>& t,
                           const std::vector<double>& error, double t_lo,
                           double t_hi) {
  Require(t.size() == error.size(), ErrorCode::kInvalidArgument,
          "slope fit: t and error lengths differ");
  SlopeResult out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(error[i] > 0.0)) {
      out.status = SlopeStatus::kBelowFloor;
      out.note = "non-positive error at t=" + FormatDouble(t[i]);
      return out;
    }
    const double x = std::log10(t[i]);
    const double y = std::log10(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++out.points;
  }
  const double n = out.points;
  const double den = n * sxx - sx * sx;
  if (out.points < 2 || !(den > 0.0)) {
    out.note = "fewer than two distinct points in window";
    return out;
  }
  out.status = SlopeStatus::kOk;
  out.slope = (n * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

SlopeResult SlopeCheck(const std::vector<TraceCsvRow>& rows, double f_star,
                       double t_lo, double t_hi) {
  std::vector<double> t, err;
  for (const auto& r : rows) {
    t.push_back(static_cast<double>(r.t));
    err.push_back(std::abs(r.f_xbar - f_star));
  }
  return FitLogLogSlope(t, err, t_lo, t_hi);
}

std::string PlotSvg(const std::vector<TraceCsvRow>& rows, const PlotOptions& opt) {
  struct Series {
    std::string label;
    std::string color;
    bool dashed;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  Series err{"|f(x_bar) - f*|", "#1f77b4", false, {}};
  Series viol{"max_k g_k(x_bar)", "#d62728", false, {}};
  Series ref{"1/t", "#7f7f7f", true, {}};
  Series obj_bound{"objective bound", "#2ca02c", true, {}};
  Series cons_bound{"constraint bound", "#ff7f0e", true, {}};
  for (const auto& r : rows) {
    if (r.t < 1) continue;
    const double t = static_cast<double>(r.t);
    if (opt.f_star) {
      const double e = std::abs(r.f_xbar - *opt.f_star);
      if (e > 0.0 && std::isfinite(e)) err.pts.push_back({t, e});
      const double b = (r.f_xbar - *opt.f_star) - r.obj_bound_residual;
      if (b > 0.0 && std::isfinite(b)) obj_bound.pts.push_back({t, b});
    }
    if (r.max_violation > 0.0) viol.pts.push_back({t, r.max_violation});
    const double cb = r.max_violation - r.cons_bound_residual;
    if (cb > 0.0 && std::isfinite(cb)) cons_bound.pts.push_back({t, cb});
  }
  // 1/t anchored at the first error (or violation) sample.
  const Series& anchor = !err.pts.empty() ? err : viol;
  if (!anchor.pts.empty()) {
    const double c = anchor.pts.front().first * anchor.pts.front().second;
    for (const auto& r : rows) {
      if (r.t >= 1) ref.pts.push_back({static_cast<double>(r.t), c / r.t});
    }
  }
  for (Series* s : {&err, &viol, &ref, &obj_bound, &cons_bound}) {
    if (!s->pts.empty()) series.push_back(std::move(*s));
  }

  double x_lo = 0, x_hi = 1, y_lo = -1, y_hi = 1;
  bool any = false;
  for (const auto& s : series) {
    for (auto [x, y] : s.pts) {
      const double lx = std::log10(x), ly = std::log10(y);
      if (!any) {
        x_lo = x_hi = lx;
        y_lo = y_hi = ly;
        any = true;
      }
      x_lo = std::min(x_lo, lx);
      x_hi = std::max(x_hi, lx);
      y_lo = std::min(y_lo, ly);
      y_hi = std::max(y_hi, ly);
    }
  }
  x_lo = std::floor(x_lo);
  x_hi = std::max(std::ceil(x_hi), x_lo + 1);
  y_lo = std::floor(y_lo);
  y_hi = std::max(std::ceil(y_hi), y_lo + 1);

  const double left = 70, right = 190, top = 40, bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto px = [&](double lx) { return left + (lx - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double ly) { return top + (y_hi - ly) / (y_hi - y_lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << opt.title << "</text>\n";
  for (int d = static_cast<int>(x_lo); d <= static_cast<int>(x_hi); ++d) {
    const std::string x = Fixed(px(d));
    svg << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\""
        << top + ph << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(y_lo); d <= static_cast<int>(y_hi); ++d) {
    const std::string y = Fixed(py(d));
    svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw
        << "\" y2=\"" << y << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << y
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">1e" << d << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 10
      << "\" text-anchor=\"middle\">iteration t (log10)</text>\n";

  int legend = 0;
  for (const auto& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << " points=\"";
    for (auto [x, y] : s.pts) {
      svg << Fixed(px(std::log10(x))) << ',' << Fixed(py(std::log10(y))) << ' ';
    }
    svg << "\"/>\n";
    const double ly = top + 14 + 20 * legend++;
    svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\""
        << left + pw + 40 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
        << "/>\n";
    svg << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly
        << "\" dominant-baseline=\"middle\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qpush
