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

#include "core/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qpush {

namespace {

using nlohmann::json;

json ParseText(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string(what) + ": " + e.what());
  }
}

const json& Field(const json& j, const char* key, const char* what) {
  Require(j.is_object() && j.contains(key), ErrorCode::kConfig,
          std::string(what) + ": missing field '" + key + "'");
  return j.at(key);
}

double Number(const json& j, const char* what) {
  Require(j.is_number(), ErrorCode::kConfig, std::string(what) + ": expected a number");
  return j.get<double>();
}

Vector ToVector(const json& j, const char* what) {
  Require(j.is_array(), ErrorCode::kConfig, std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = Number(j[i], what);
  return v;
}

Vector SizedVector(const json& j, Eigen::Index n, const char* what) {
  Vector v = ToVector(j, what);
  Require(v.size() == n, ErrorCode::kConfig,
          std::string(what) + ": expected length " + std::to_string(n));
  return v;
}

Matrix ToMatrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                const char* what) {
  Require(j.is_array() && static_cast<Eigen::Index>(j.size()) == rows,
          ErrorCode::kConfig, std::string(what) + ": wrong row count");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = SizedVector(j[r], cols, what);
  return m;
}

}  // namespace

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConvexProgram ParseProblemJson(const std::string& text) {
  const char* what = "problem file";
  json j = ParseText(text, what);
  const json& nj = Field(j, "n", what);
  Require(nj.is_number_integer() && nj.get<long long>() > 0, ErrorCode::kConfig,
          "problem file: n must be a positive integer");
  const int n = nj.get<int>();
  int m = 0;
  if (j.contains("m")) {
    Require(j["m"].is_number_integer() && j["m"].get<long long>() >= 0,
            ErrorCode::kConfig, "problem file: m must be a nonnegative integer");
    m = j["m"].get<int>();
  }
  const json& box = Field(j, "box", what);
  BoxSet set = BoxSet::Make(SizedVector(Field(box, "lo", what), n, "box.lo"),
                            SizedVector(Field(box, "hi", what), n, "box.hi"));

  Matrix a = Matrix::Zero(m, n);
  Vector b = Vector::Zero(m);
  if (m > 0) {
    const json& lin = Field(j, "linear", what);
    a = ToMatrix(Field(lin, "A", what), m, n, "linear.A");
    b = SizedVector(Field(lin, "b", what), m, "linear.b");
  } else if (j.contains("linear")) {
    throw Error(ErrorCode::kConfig, "problem file: 'linear' given but m is 0");
  }

  const json& obj = Field(j, "objective", what);
  const std::string kind = Field(obj, "kind", what).get<std::string>();
  std::vector<ScalarTerm> terms(n);
  Vector c = obj.contains("c") ? SizedVector(obj["c"], n, "objective.c")
                               : Vector::Zero(n);
  for (int i = 0; i < n; ++i) terms[i].lin = c[i];
  Sense sense = Sense::kMinimize;
  if (kind == "linear") {
  } else if (kind == "diag-quadratic") {
    Vector p = SizedVector(Field(obj, "P", what), n, "objective.P");
    for (int i = 0; i < n; ++i) terms[i].quad = p[i];
  } else if (kind == "neg-log-utility") {
    Vector w = SizedVector(Field(obj, "weights", what), n, "objective.weights");
    for (int i = 0; i < n; ++i) terms[i].neg_log = w[i];
    sense = Sense::kMaximize;
  } else {
    throw Error(ErrorCode::kConfig, "problem file: unknown objective kind '" + kind + "'");
  }
  if (j.contains("sense")) {
    const std::string s = j["sense"].get<std::string>();
    Require(s == "minimize" || s == "maximize", ErrorCode::kConfig,
            "problem file: sense must be 'minimize' or 'maximize'");
    sense = s == "maximize" ? Sense::kMaximize : Sense::kMinimize;
  }
  std::optional<double> beta;
  if (j.contains("beta")) beta = Number(j["beta"], "beta");
  std::string name = j.contains("name") ? j["name"].get<std::string>() : "custom";
  return ConvexProgram::FromLinear(name, std::move(set), std::move(terms),
                                   std::move(a), std::move(b), beta)
      .WithSense(sense);
}

ConvexProgram LoadProblemFile(const std::string& path) {
  return ParseProblemJson(ReadTextFile(path));
}

NumProblem ParseTopologyJson(const std::string& text) {
  const char* what = "topology file";
  json j = ParseText(text, what);
  Vector cap = ToVector(Field(j, "capacities", what), "capacities");
  const json& paths_j = Field(j, "paths", what);
  Require(paths_j.is_array(), ErrorCode::kConfig, "topology file: paths must be an array");
  std::vector<PathSpec> paths;
  int num_sources = 0;
  for (const json& p : paths_j) {
    PathSpec spec;
    const json& s = Field(p, "source", what);
    Require(s.is_number_integer(), ErrorCode::kConfig,
            "topology file: source must be an integer");
    spec.source = s.get<int>();
    const json& links = Field(p, "links", what);
    Require(links.is_array(), ErrorCode::kConfig, "topology file: links must be an array");
    for (const json& l : links) {
      Require(l.is_number_integer(), ErrorCode::kConfig,
              "topology file: link ids must be integers");
      spec.links.push_back(l.get<int>());
    }
    num_sources = std::max(num_sources, spec.source + 1);
    paths.push_back(std::move(spec));
  }
  const json& utils = Field(j, "utilities", what);
  Require(utils.is_array(), ErrorCode::kConfig, "topology file: utilities must be an array");
  std::vector<Utility> utilities;
  for (const json& u : utils) {
    const std::string kind = Field(u, "kind", what).get<std::string>();
    Require(kind == "log", ErrorCode::kConfig,
            "topology file: only 'log' utilities are supported");
    utilities.push_back({Number(Field(u, "weight", what), "weight")});
  }
  num_sources = std::max(num_sources, static_cast<int>(utilities.size()));
  Topology topo = Topology::FromPaths(std::move(cap), paths, num_sources);
  return MakeNumProblem(std::move(topo), std::move(utilities),
                        ToVector(Field(j, "x_max", what), "x_max"),
                        ToVector(Field(j, "y_max", what), "y_max"));
}

NumProblem LoadTopologyFile(const std::string& path) {
  return ParseTopologyJson(ReadTextFile(path));
}

ReferenceSolution ParseReferenceJson(const std::string& text) {
  const char* what = "reference file";
  json j = ParseText(text, what);
  ReferenceSolution ref;
  ref.f_star = Number(Field(j, "f_star", what), "f_star");
  ref.x_star = ToVector(Field(j, "x_star", what), "x_star");
  ref.lambda_star = ToVector(Field(j, "lambda_star", what), "lambda_star");
  Require((ref.lambda_star.array() >= 0.0).all(), ErrorCode::kConfig,
          "reference file: lambda_star must be nonnegative");
  if (j.contains("beta") && !j["beta"].is_null()) ref.beta = Number(j["beta"], "beta");
  return ref;
}

ReferenceSolution LoadReferenceFile(const std::string& path) {
  return ParseReferenceJson(ReadTextFile(path));
}

std::string ReferenceToJson(const ReferenceSolution& ref) {
  json j;
  j["f_star"] = ref.f_star;
  j["x_star"] = std::vector<double>(ref.x_star.data(), ref.x_star.data() + ref.x_star.size());
  j["lambda_star"] = std::vector<double>(ref.lambda_star.data(),
                                         ref.lambda_star.data() + ref.lambda_star.size());
  if (ref.beta) j["beta"] = *ref.beta;
  return j.dump(2);
}

Vector LoadVectorFile(const std::string& path) {
  return ToVector(ParseText(ReadTextFile(path), "vector file"), "vector file");
}

}  // namespace qpush
