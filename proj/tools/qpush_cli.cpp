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

// qpush: run, verify, benchmark and plot virtual-queue solver experiments.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpush/qpush.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitBound = 4;

struct ProblemDeleter {
  void operator()(qpush_problem* p) const { qpush_problem_destroy(p); }
};
struct ReportDeleter {
  void operator()(qpush_report* r) const { qpush_report_destroy(r); }
};
struct BoundsDeleter {
  void operator()(qpush_bounds* b) const { qpush_bounds_destroy(b); }
};
using ProblemPtr = std::unique_ptr<qpush_problem, ProblemDeleter>;
using ReportPtr = std::unique_ptr<qpush_report, ReportDeleter>;
using BoundsPtr = std::unique_ptr<qpush_bounds, BoundsDeleter>;

// Carries the exit code of a failed library call up to main.
struct CliFailure {
  int exit_code;
  std::string message;
};

int ExitCodeFor(qpush_status s) {
  switch (s) {
    case QPUSH_OK:
      return kExitOk;
    case QPUSH_ERR_NUMERICAL:
    case QPUSH_ERR_INTERNAL:
      return kExitNumerical;
    case QPUSH_ERR_BOUND_VIOLATION:
      return kExitBound;
    default:
      return kExitConfig;
  }
}

void Check(qpush_status s, const std::string& context) {
  if (s != QPUSH_OK) {
    throw CliFailure{ExitCodeFor(s), context + ": " + qpush_last_error()};
  }
}

struct RunArgs {
  std::string problem = "fig1-num";
  std::string problem_file;
  std::string topology_file;
  uint64_t seed = 1;
  std::string algo = "vq";
  std::string alpha = "default";
  double gamma = 0.01;
  int64_t iterations = 10000;
  int64_t record_every = 0;
  std::string x_init_file;
  bool full_trace = false;
  std::string reference_file;
  bool decentralized = false;
  std::string out = "out";
  bool no_plot = false;
};

void AddRunOptions(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--problem", a.problem, "fig1-num | fig1-flow-power | qp")
      ->capture_default_str();
  cmd->add_option("--problem-file", a.problem_file, "program JSON file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--topology", a.topology_file, "network topology JSON file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "seed for the random QP")->capture_default_str();
  cmd->add_option("--algo", a.algo, "vq | dsg")
      ->check(CLI::IsMember({"vq", "dsg"}))
      ->capture_default_str();
  cmd->add_option("--alpha", a.alpha,
                  "prox weight: a number, 'auto' (beta^2/2 + 1) or 'default'")
      ->capture_default_str();
  cmd->add_option("--gamma", a.gamma, "dual subgradient step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--T", a.iterations, "iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--record-every", a.record_every, "trace stride (0 = automatic)");
  cmd->add_option("--x-init", a.x_init_file, "JSON array with x(-1)")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--full-trace", a.full_trace, "also write trace_full.csv");
  cmd->add_flag("--decentralized", a.decentralized,
                "run the per-link/per-source agent simulation (network problems)");
  cmd->add_option("--out", a.out, "output directory (QPUSH_OUT overrides)")
      ->capture_default_str();
  cmd->add_flag("--no-plot", a.no_plot, "skip convergence.svg");
}

fs::path OutputDir(const std::string& requested) {
  const char* env = std::getenv("QPUSH_OUT");
  fs::path dir = (env != nullptr && *env != '\0') ? fs::path(env) : fs::path(requested);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliFailure{kExitConfig, "cannot create " + dir.string() + ": " + ec.message()};
  return dir;
}

ProblemPtr OpenProblem(const RunArgs& a) {
  qpush_problem* raw = nullptr;
  if (!a.problem_file.empty()) {
    Check(qpush_problem_load_json(a.problem_file.c_str(), &raw), "loading problem");
  } else if (!a.topology_file.empty()) {
    Check(qpush_problem_load_topology(a.topology_file.c_str(), &raw), "loading topology");
  } else {
    Check(qpush_problem_create_named(a.problem.c_str(), a.seed, &raw), "creating problem");
  }
  return ProblemPtr(raw);
}

std::vector<double> ReadVector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliFailure{kExitConfig, "cannot open " + path};
  try {
    return json::parse(in).get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw CliFailure{kExitConfig, path + ": " + e.what()};
  }
}

double ResolveAlpha(const std::string& spec, const qpush_problem_info& info,
                    bool verbose) {
  if (spec == "default") return info.default_alpha;
  if (spec == "auto") {
    if (!info.has_beta) {
      throw CliFailure{kExitConfig, "--alpha auto needs a Lipschitz estimate for this problem"};
    }
    const double alpha = 0.5 * info.beta * info.beta + 1.0;
    if (verbose) {
      std::printf("alpha auto = beta^2/2 + 1 = %.6g (beta = %.7g)\n", alpha, info.beta);
      if (info.is_network) {
        std::printf("hop bound on beta = %.7g, giving beta^2/2 + 1 = %.6g\n",
                    info.hop_bound, 0.5 * info.hop_bound * info.hop_bound + 1.0);
      }
    }
    return alpha;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(spec, &used);
    if (used != spec.size() || !(v > 0.0)) throw std::invalid_argument(spec);
    return v;
  } catch (const std::exception&) {
    throw CliFailure{kExitConfig, "--alpha must be positive, 'auto' or 'default'"};
  }
}

json Nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct RunOutcome {
  ReportPtr report;
  qpush_status status = QPUSH_OK;
};

RunOutcome Execute(const qpush_problem* problem, const RunArgs& a, double alpha,
                   const std::vector<double>& x_init) {
  qpush_run_options opt;
  qpush_run_options_init(&opt);
  if (a.algo == "dsg") {
    if (a.decentralized) throw CliFailure{kExitConfig, "--decentralized applies to vq only"};
    opt.algorithm = QPUSH_ALGO_DSG;
  } else {
    opt.algorithm = a.decentralized ? QPUSH_ALGO_VQ_DECENTRALIZED : QPUSH_ALGO_VQ;
  }
  opt.alpha = alpha;
  opt.gamma = a.gamma;
  opt.iterations = a.iterations;
  opt.record_every = a.record_every;
  if (!x_init.empty()) {
    opt.x_init = x_init.data();
    opt.x_init_len = x_init.size();
  }
  qpush_report* raw = nullptr;
  RunOutcome out;
  out.status = qpush_run(problem, &opt, &raw);
  out.report.reset(raw);
  if (raw == nullptr) Check(out.status, "run");
  return out;
}

// Writes trace.csv, summary.json and optionally trace_full.csv, bounds.csv
// and convergence.svg. Returns the process exit code.
int RunAndWrite(const RunArgs& a, bool require_reference) {
  ProblemPtr problem = OpenProblem(a);
  qpush_problem_info info;
  Check(qpush_problem_info_get(problem.get(), &info), "problem info");
  const double alpha = ResolveAlpha(a.alpha, info, true);
  std::vector<double> x_init;
  if (!a.x_init_file.empty()) x_init = ReadVector(a.x_init_file);
  if (require_reference && a.algo != "vq") {
    throw CliFailure{kExitConfig, "bound verification applies to --algo vq"};
  }

  RunOutcome run = Execute(problem.get(), a, alpha, x_init);
  qpush_report* report = run.report.get();
  const fs::path dir = OutputDir(a.out);

  BoundsPtr bounds;
  qpush_status bound_status = QPUSH_OK;
  if (!a.reference_file.empty() && run.status == QPUSH_OK) {
    qpush_bounds* raw = nullptr;
    bound_status = qpush_verify_bounds(problem.get(), report, a.reference_file.c_str(),
                                       1e-9, &raw);
    bounds.reset(raw);
    if (raw == nullptr) Check(bound_status, "verifying bounds");
    Check(qpush_bounds_write_csv(raw, (dir / "bounds.csv").c_str()), "writing bounds.csv");
  }

  const fs::path trace = dir / "trace.csv";
  Check(qpush_report_write_csv(report, bounds.get(), trace.c_str()), "writing trace.csv");
  if (a.full_trace) {
    Check(qpush_report_write_full_csv(report, (dir / "trace_full.csv").c_str()),
          "writing trace_full.csv");
  }

  qpush_report_summary s;
  Check(qpush_report_summary_get(report, &s), "summary");
  json summary;
  summary["problem"] = info.name;
  summary["algorithm"] = qpush_report_algorithm(report);
  summary["oracle"] = qpush_report_oracle(report);
  summary["sense"] = info.maximize ? "maximize" : "minimize";
  summary["iterations"] = s.iterations;
  summary["completed_iterations"] = s.completed_iterations;
  summary["final_objective"] = Nullable(s.native_value);
  summary["final_objective_minimized"] = Nullable(s.f_xbar);
  summary["max_violation"] = Nullable(s.max_violation);
  summary["queue_norm"] = Nullable(s.queue_norm);
  summary["alpha"] = s.alpha;
  if (a.algo == "dsg") summary["gamma"] = s.gamma;
  summary["beta"] = {{"estimate", Nullable(s.beta)},
                     {"frobenius", Nullable(info.frobenius)}};
  if (info.is_network) {
    summary["beta"]["hop_bound"] = info.hop_bound;
    summary["beta"]["loose_bound"] = info.loose_bound;
  }
  if (info.has_optimum) {
    summary["known_optimum"] = info.optimum;
    summary["error"] = Nullable(s.native_value - info.optimum);
  }
  if (info.has_published_value) summary["published_value"] = info.published_value;
  summary["invariant_checks"] = s.invariant_checks;
  summary["invariant_failures"] = s.invariant_failures;
  summary["wall_seconds"] = s.wall_seconds;
  if (a.decentralized) {
    summary["messages"] = {{"price", s.price_messages}, {"rate", s.rate_messages}};
  }
  json warnings = json::array();
  for (size_t i = 0; i < s.num_warnings; ++i) warnings.push_back(qpush_report_warning(report, i));
  summary["warnings"] = warnings;
  if (const char* f = qpush_report_failure(report)) summary["failure"] = f;
  if (bounds) {
    json checks = json::object();
    for (int i = 0; i < 4; ++i) {
      qpush_bound_check c;
      Check(qpush_bounds_check(bounds.get(), i, &c), "bounds");
      checks[c.name] = {{"status", c.status == QPUSH_BOUND_PASSED   ? "passed"
                                   : c.status == QPUSH_BOUND_FAILED ? "failed"
                                                                    : "skipped"},
                        {"checked", c.checked},
                        {"violations", c.violations},
                        {"worst_margin", Nullable(c.worst_margin)}};
    }
    summary["bounds"] = checks;
  }
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';

  if (!a.no_plot) {
    const double f_star_min =
        info.has_optimum ? (info.maximize ? -info.optimum : info.optimum) : NAN;
    const std::string title = std::string(info.name) + " (" + qpush_report_algorithm(report) + ")";
    Check(qpush_plot_svg(trace.c_str(), (dir / "convergence.svg").c_str(), title.c_str(),
                         f_star_min),
          "plotting");
  }

  for (size_t i = 0; i < s.num_warnings; ++i) {
    std::fprintf(stderr, "warning: %s\n", qpush_report_warning(report, i));
  }
  std::printf("%s %s: T=%lld objective=%.9g max_violation=%.3g |Q|=%.6g (%.2fs)\n",
              info.name, qpush_report_algorithm(report),
              static_cast<long long>(s.completed_iterations), s.native_value,
              s.max_violation, s.queue_norm, s.wall_seconds);
  std::printf("wrote %s\n", dir.c_str());
  if (run.status != QPUSH_OK) {
    std::fprintf(stderr, "error: %s\n", qpush_report_failure(report));
    return ExitCodeFor(run.status);
  }
  if (s.invariant_failures > 0) {
    std::fprintf(stderr, "error: %lld invariant failures\n",
                 static_cast<long long>(s.invariant_failures));
    return kExitNumerical;
  }
  if (bound_status != QPUSH_OK) {
    std::fprintf(stderr, "error: bound verification failed (see bounds.csv)\n");
    return ExitCodeFor(bound_status);
  }
  if (bounds) std::printf("bounds: all checks passed\n");
  return kExitOk;
}

struct BenchRow {
  std::string algo;
  double value = NAN;
  double error = NAN;
  double violation = NAN;
  double seconds = 0;
};

int Bench(RunArgs a) {
  ProblemPtr problem = OpenProblem(a);
  qpush_problem_info info;
  Check(qpush_problem_info_get(problem.get(), &info), "problem info");
  const double alpha = ResolveAlpha(a.alpha, info, false);
  auto job = [&](std::string algo) {
    RunArgs local = a;
    local.algo = algo;
    local.decentralized = false;
    RunOutcome r = Execute(problem.get(), local, alpha, {});
    Check(r.status, algo);
    qpush_report_summary s;
    Check(qpush_report_summary_get(r.report.get(), &s), "summary");
    BenchRow row{algo, s.native_value, NAN, s.max_violation, s.wall_seconds};
    if (info.has_optimum) row.error = std::abs(s.native_value - info.optimum);
    return row;
  };
  auto vq = std::async(std::launch::async, job, std::string("vq"));
  auto dsg = std::async(std::launch::async, job, std::string("dsg"));
  std::vector<BenchRow> rows = {vq.get(), dsg.get()};
  std::printf("%s, T=%lld, alpha=%g, gamma=%g\n", info.name,
              static_cast<long long>(a.iterations), alpha, a.gamma);
  std::printf("%-6s %16s %12s %14s %9s\n", "algo", "objective", "|error|", "max_violation",
              "seconds");
  for (const auto& r : rows) {
    std::printf("%-6s %16.9f %12.3e %14.3e %9.2f\n", r.algo.c_str(), r.value, r.error,
                r.violation, r.seconds);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual-queue prox solver for constrained convex programs"};
  app.set_version_flag("--version", std::string(qpush_version()));
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run a solver and write traces");
  AddRunOptions(run, run_args);
  run->add_option("--verify-bounds", run_args.reference_file,
                  "reference JSON {f_star, x_star, lambda_star, beta}")
      ->check(CLI::ExistingFile);

  RunArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "run vq and check the convergence bounds");
  AddRunOptions(verify, verify_args);
  verify->add_option("--reference", verify_args.reference_file, "reference JSON")
      ->required()
      ->check(CLI::ExistingFile);

  RunArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "paired vq / dsg comparison");
  AddRunOptions(bench, bench_args);

  std::string plot_trace, plot_out = "convergence.svg", plot_title = "convergence";
  std::optional<double> plot_f_star;
  CLI::App* plot = app.add_subcommand("plot", "render an SVG from a trace CSV");
  plot->add_option("--trace", plot_trace, "trace.csv")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "output SVG path")->capture_default_str();
  plot->add_option("--title", plot_title, "plot title");
  plot->add_option("--f-star", plot_f_star,
                   "optimal value in the minimized sense (same sense as f_xbar)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return RunAndWrite(run_args, false);
    if (*verify) return RunAndWrite(verify_args, true);
    if (*bench) return Bench(bench_args);
    if (*plot) {
      Check(qpush_plot_svg(plot_trace.c_str(), plot_out.c_str(), plot_title.c_str(),
                           plot_f_star.value_or(NAN)),
            "plotting");
      std::printf("wrote %s\n", plot_out.c_str());
      return kExitOk;
    }
  } catch (const CliFailure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.exit_code;
  }
  return kExitOk;
}
