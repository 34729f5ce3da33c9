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

#include "bankfair/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bankfair/domain.hpp"

namespace bankfair {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError("invalid value '" + std::string(text) + "' for '" + std::string(key) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ParseError("invalid boolean '" + std::string(text) + "' for '" + std::string(key) + "'");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

std::string_view to_string(ForecastMethod m) {
  switch (m) {
    case ForecastMethod::mean: return "mean";
    case ForecastMethod::seasonal: return "seasonal";
    case ForecastMethod::last: return "last";
  }
  return "?";
}

std::string_view to_string(DemandWeighting w) {
  return w == DemandWeighting::uniform ? "uniform" : "merit";
}

std::string_view to_string(SolverMode m) {
  return m == SolverMode::exact ? "exact" : "parametric";
}

std::string_view to_string(MeritMode m) {
  return m == MeritMode::relevance ? "relevance" : "size";
}

void RunConfig::validate() const {
  require(K >= 1, "K must be >= 1");
  require(N >= 0, "N must be >= 0");
  require(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
  require(delta > 0.0 && std::isfinite(delta), "delta must be > 0");
  require(alpha_risk == 1.0, "alpha_risk is fixed at 1.0");
  require(alpha_demand > 0.0, "alpha_demand must be > 0");
  require(beta_min >= 0.0 && beta_min <= 1.0, "beta_min must lie in [0, 1]");
  require(eta > 0.0, "eta must be > 0");
  require(k_steep > 0.0, "k_steep must be > 0");
  require(g0 > 0.0, "g0 must be > 0");
  require(forecast_prior >= 0.0, "forecast_prior must be >= 0");
  require(seasonal_period >= 1, "seasonal_period must be >= 1");
  require(scan_points >= 1, "scan_points must be >= 1");
  require(anchor_rate >= 0.0, "anchor_rate must be >= 0");
  require(decision_scale >= 0.0, "decision_scale must be >= 0");
  require(target_floor > 0.0 && target_floor <= 1.0, "target_floor must lie in (0, 1]");
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  const std::string_view v = value;
  if (key == "K") K = parse_number<Index>(key, v);
  else if (key == "N") N = parse_number<Index>(key, v);
  else if (key == "lambda") lambda = parse_number<double>(key, v);
  else if (key == "delta") delta = parse_number<double>(key, v);
  else if (key == "alpha_risk") alpha_risk = parse_number<double>(key, v);
  else if (key == "alpha_demand") alpha_demand = parse_number<double>(key, v);
  else if (key == "beta_min") beta_min = parse_number<double>(key, v);
  else if (key == "eta") eta = parse_number<double>(key, v);
  else if (key == "k_steep") k_steep = parse_number<double>(key, v);
  else if (key == "g0") g0 = parse_number<double>(key, v);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "forecast_prior") forecast_prior = parse_number<double>(key, v);
  else if (key == "seasonal_period") seasonal_period = parse_number<Index>(key, v);
  else if (key == "scan_points") scan_points = parse_number<Index>(key, v);
  else if (key == "decision_scale") decision_scale = parse_number<double>(key, v);
  else if (key == "anchor_rate") anchor_rate = parse_number<double>(key, v);
  else if (key == "target_floor") target_floor = parse_number<double>(key, v);
  else if (key == "refine") refine = parse_bool(key, v);
  else if (key == "forecast_method") {
    if (v == "mean") forecast_method = ForecastMethod::mean;
    else if (v == "seasonal") forecast_method = ForecastMethod::seasonal;
    else if (v == "last") forecast_method = ForecastMethod::last;
    else throw ParseError("forecast_method must be mean|seasonal|last");
  } else if (key == "demand_weighting") {
    if (v == "merit") demand_weighting = DemandWeighting::merit;
    else if (v == "uniform") demand_weighting = DemandWeighting::uniform;
    else throw ParseError("demand_weighting must be merit|uniform");
  } else if (key == "merit_mode") {
    if (v == "size") merit_mode = MeritMode::size;
    else if (v == "relevance") merit_mode = MeritMode::relevance;
    else throw ParseError("merit_mode must be size|relevance");
  } else if (key == "solver_mode") {
    if (v == "parametric") solver_mode = SolverMode::parametric;
    else if (v == "exact") solver_mode = SolverMode::exact;
    else throw ParseError("solver_mode must be parametric|exact");
  } else {
    throw ParseError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  return from_file(path, RunConfig{});
}

RunConfig RunConfig::from_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty() || body.front() == '[') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    try {
      base.set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return base;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "K = " << K << '\n'
     << "N = " << N << '\n'
     << "lambda = " << format_double(lambda) << '\n'
     << "delta = " << format_double(delta) << '\n'
     << "alpha_risk = " << format_double(alpha_risk) << '\n'
     << "alpha_demand = " << format_double(alpha_demand) << '\n'
     << "beta_min = " << format_double(beta_min) << '\n'
     << "eta = " << format_double(eta) << '\n'
     << "k_steep = " << format_double(k_steep) << '\n'
     << "g0 = " << format_double(g0) << '\n'
     << "forecast_method = " << to_string(forecast_method) << '\n'
     << "seed = " << seed << '\n'
     << "demand_weighting = " << to_string(demand_weighting) << '\n'
     << "forecast_prior = " << format_double(forecast_prior) << '\n'
     << "seasonal_period = " << seasonal_period << '\n'
     << "merit_mode = " << to_string(merit_mode) << '\n'
     << "solver_mode = " << to_string(solver_mode) << '\n'
     << "scan_points = " << scan_points << '\n'
     << "refine = " << (refine ? "true" : "false") << '\n'
     << "anchor_rate = " << format_double(anchor_rate) << '\n'
     << "decision_scale = " << format_double(decision_scale) << '\n'
     << "target_floor = " << format_double(target_floor) << '\n';
  return os.str();
}

}  // namespace bankfair
