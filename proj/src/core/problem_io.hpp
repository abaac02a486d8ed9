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

#include <string>

#include "core/bounds.hpp"
#include "core/netflow.hpp"
#include "core/program.hpp"

namespace qpush {

// Problem file:
//   {"name": "...", "n": 3, "m": 1,
//    "box": {"lo": [...], "hi": [...]},
//    "linear": {"A": [[...], ...], "b": [...]},
//    "objective": {"kind": "linear", "c": [...]}
//               | {"kind": "diag-quadratic", "P": [...], "c": [...]}
//               | {"kind": "neg-log-utility", "weights": [...], "c": [...]},
//    "sense": "minimize" | "maximize", "beta": 1.0}
// "linear" may be omitted when m == 0; "c", "sense" and "beta" are optional.
ConvexProgram ParseProblemJson(const std::string& text);
ConvexProgram LoadProblemFile(const std::string& path);

// Topology file:
//   {"capacities": [...], "paths": [{"source": s, "links": [...]}, ...],
//    "x_max": [...], "y_max": [...],
//    "utilities": [{"kind": "log", "weight": w}, ...]}
NumProblem ParseTopologyJson(const std::string& text);
NumProblem LoadTopologyFile(const std::string& path);

// Reference file: {"f_star": f, "x_star": [...], "lambda_star": [...], "beta": b}
// with f_star in the minimized sense; "beta" is optional.
ReferenceSolution ParseReferenceJson(const std::string& text);
ReferenceSolution LoadReferenceFile(const std::string& path);
std::string ReferenceToJson(const ReferenceSolution& reference);

// A bare JSON array of numbers.
Vector LoadVectorFile(const std::string& path);

std::string ReadTextFile(const std::string& path);

}  // namespace qpush
