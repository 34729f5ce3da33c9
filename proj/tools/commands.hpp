// Copyright 2026 The BankFair Authors
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

// Subcommands of the `bankfair` tool, callable in-process for tests.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bankfair/config.hpp"
#include "bankfair/io.hpp"
#include "bankfair/session.hpp"

namespace bankfair::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInput = 2;

struct DatasetPaths {
  std::filesystem::path scores;
  std::filesystem::path catalog;
  std::filesystem::path arrivals;
};

Dataset load_dataset(const DatasetPaths& paths, const RunConfig& config);

struct SweepGrid {
  std::vector<double> lambdas;
  std::vector<double> deltas;
  Index repetitions = 1;
  RunConfig base;

  /// Throws ValidationError on empty lists or out-of-range values.
  void validate() const;
};

/// Runs every (lambda, delta, repetition) point on `jobs` threads. Rows come
/// back sorted by lambda, then delta, then repetition; repetition r uses
/// seed base.seed + r.
std::vector<FrontierRow> run_sweep(const Dataset& dataset, const SweepGrid& grid, Policy policy,
                                   int jobs);

/// Parses `args` (without the program name) and runs the subcommand.
/// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bankfair::cli
