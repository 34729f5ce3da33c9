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

// Seeded synthetic marketplaces: users, Zipf-sized providers, skewed scores
// and a traffic curve over the horizon.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "bankfair/core.hpp"
#include "bankfair/domain.hpp"

namespace bankfair {

enum class ScoreDistribution { uniform, beta_skewed };
enum class TrafficPattern { constant, sinusoidal, bursty };

struct SyntheticSpec {
  Index users = 1000;
  Index items = 500;
  Index providers = 20;
  ScoreDistribution score_distribution = ScoreDistribution::beta_skewed;
  double provider_size_skew = 1.0;  // Zipf exponent
  double quality_spread = 0.15;     // sd of the per-provider score offset
  TrafficPattern traffic_pattern = TrafficPattern::sinusoidal;
  Index intervals = 8;
  Index arrivals = 0;  // 0: every user arrives once
  std::uint64_t seed = 42;

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

struct SyntheticDataset {
  PreferenceStore store;
  ProviderCatalog catalog;
  ArrivalSchedule schedule;
};

/// Independent generator for a named component of a seeded run.
std::mt19937_64 substream(std::uint64_t seed, std::string_view name);

/// Items per provider: Zipf weights, at least one item each, largest
/// remainder rounding with ties to the lower index.
std::vector<Index> provider_sizes(Index items, Index providers, double skew);

/// Arrivals per interval for `total` arrivals, same rounding rule.
std::vector<Index> traffic_counts(Index total, Index intervals, TrafficPattern pattern,
                                  std::mt19937_64& rng);

SyntheticDataset generate_dataset(const SyntheticSpec& spec);

ScoreDistribution parse_score_distribution(std::string_view text);
TrafficPattern parse_traffic_pattern(std::string_view text);

}  // namespace bankfair
