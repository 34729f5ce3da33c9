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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bankfair/bankruptcy.hpp"
#include "bankfair/core.hpp"

namespace bankfair {

enum class SolverMode { parametric, exact };
enum class MeritMode { size, relevance };

/// Every knob of a run. Field names double as config-file keys.
struct RunConfig {
  Index K = 10;
  Index N = 0;  // 0: take the interval count from the arrival schedule
  double lambda = 0.5;
  double delta = 1.0;
  double alpha_risk = 1.0;
  double alpha_demand = 1.0;
  double beta_min = 0.9;
  double eta = 0.001;
  double k_steep = 10.0;
  double g0 = 1.0;
  ForecastMethod forecast_method = ForecastMethod::mean;
  std::uint64_t seed = 42;

  DemandWeighting demand_weighting = DemandWeighting::merit;
  double forecast_prior = 0.0;  // 0: total arrivals / N
  Index seasonal_period = 2;
  MeritMode merit_mode = MeritMode::size;
  SolverMode solver_mode = SolverMode::parametric;
  Index scan_points = 32;
  bool refine = true;
  double decision_scale = 0.0;  // 0: 1 / (arrivals in the interval)
  double anchor_rate = 1.0;     // 0: lower satisfaction anchor uses delta
  double target_floor = 0.05;   // share of catalog merit mixed into the interval target

  /// Throws ValidationError naming the first violated range.
  void validate() const;

  /// Assigns one field from its textual form. Throws ParseError on an
  /// unknown key or malformed value.
  void set(std::string_view key, std::string_view value);

  /// `key = value` lines in file order; values are validated afterwards.
  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_file(const std::filesystem::path& path, RunConfig base);
  std::string to_text() const;
};

std::string_view to_string(ForecastMethod m);
std::string_view to_string(DemandWeighting w);
std::string_view to_string(SolverMode m);
std::string_view to_string(MeritMode m);

}  // namespace bankfair
