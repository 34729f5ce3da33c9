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

#include "bankfair/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace bankfair {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Rounds `weights` scaled to `total` so the parts sum to `total`.
std::vector<Index> largest_remainder(const std::vector<double>& weights, Index total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<Index> parts(weights.size());
  std::vector<double> rest(weights.size());
  Index assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    parts[i] = static_cast<Index>(std::floor(exact));
    rest[i] = exact - static_cast<double>(parts[i]);
    assigned += parts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rest[a] > rest[b]; });
  for (std::size_t j = 0; assigned < total; ++j, ++assigned) ++parts[order[j % order.size()]];
  return parts;
}

std::string padded(char prefix, Index value, Index count) {
  const std::size_t width = std::to_string(std::max<Index>(count - 1, 0)).size();
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

double beta_draw(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (users < 1 || items < 1 || providers < 1) {
    throw ValidationError("synthetic: users, items and providers must be >= 1");
  }
  if (providers > items) throw ValidationError("synthetic: more providers than items");
  if (provider_size_skew < 0.0) throw ValidationError("synthetic: Zipf exponent must be >= 0");
  if (quality_spread < 0.0) throw ValidationError("synthetic: quality_spread must be >= 0");
  if (intervals < 1) throw ValidationError("synthetic: intervals must be >= 1");
  if (arrivals < 0) throw ValidationError("synthetic: arrivals must be >= 0");
}

std::mt19937_64 substream(std::uint64_t seed, std::string_view name) {
  const std::uint64_t tag = fnv1a(name);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Index> provider_sizes(Index items, Index providers, double skew) {
  if (providers < 1 || providers > items) {
    throw std::invalid_argument("provider_sizes: need 1 <= providers <= items");
  }
  std::vector<double> weights(static_cast<std::size_t>(providers));
  for (Index p = 0; p < providers; ++p) {
    weights[static_cast<std::size_t>(p)] = std::pow(static_cast<double>(p + 1), -skew);
  }
  // One item each up front, the rest by weight.
  std::vector<Index> sizes = largest_remainder(weights, items - providers);
  for (Index& s : sizes) ++s;
  return sizes;
}

std::vector<Index> traffic_counts(Index total, Index intervals, TrafficPattern pattern,
                                  std::mt19937_64& rng) {
  if (intervals < 1) throw std::invalid_argument("traffic_counts: need >= 1 interval");
  std::vector<double> weights(static_cast<std::size_t>(intervals), 1.0);
  switch (pattern) {
    case TrafficPattern::constant:
      break;
    case TrafficPattern::sinusoidal:
      for (Index n = 0; n < intervals; ++n) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(n) /
                             static_cast<double>(intervals);
        weights[static_cast<std::size_t>(n)] = 1.0 + 0.5 * std::sin(phase);
      }
      break;
    case TrafficPattern::bursty: {
      std::bernoulli_distribution burst(0.25);
      for (double& w : weights) w = burst(rng) ? 3.0 : 1.0;
      break;
    }
  }
  return largest_remainder(weights, total);
}

SyntheticDataset generate_dataset(const SyntheticSpec& spec) {
  spec.validate();
  auto size_rng = substream(spec.seed, "catalog");
  auto score_rng = substream(spec.seed, "scores");
  auto traffic_rng = substream(spec.seed, "traffic");
  auto arrival_rng = substream(spec.seed, "arrivals");

  const std::vector<Index> sizes = provider_sizes(spec.items, spec.providers, spec.provider_size_skew);
  // Shuffle which items land with which provider so item ids carry no signal.
  std::vector<Index> owner;
  owner.reserve(static_cast<std::size_t>(spec.items));
  for (Index p = 0; p < spec.providers; ++p) {
    owner.insert(owner.end(), static_cast<std::size_t>(sizes[static_cast<std::size_t>(p)]), p);
  }
  std::shuffle(owner.begin(), owner.end(), size_rng);

  ProviderCatalog::Builder catalog;
  for (Index i = 0; i < spec.items; ++i) {
    catalog.add(padded('i', i, spec.items),
                padded('p', owner[static_cast<std::size_t>(i)], spec.providers));
  }

  std::normal_distribution<double> offset_draw(0.0, 1.0);
  std::vector<double> offset(static_cast<std::size_t>(spec.providers));
  for (double& o : offset) o = spec.quality_spread * offset_draw(score_rng);

  PreferenceStore::Builder store;
  std::vector<std::string> item_ids;
  for (Index i = 0; i < spec.items; ++i) item_ids.push_back(padded('i', i, spec.items));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (Index u = 0; u < spec.users; ++u) {
    const std::string user = padded('u', u, spec.users);
    for (Index i = 0; i < spec.items; ++i) {
      const double base = spec.score_distribution == ScoreDistribution::uniform
                              ? uniform(score_rng)
                              : beta_draw(score_rng, 2.0, 5.0);
      const double s = std::clamp(base + offset[static_cast<std::size_t>(owner[static_cast<std::size_t>(i)])], 0.0, 1.0);
      store.add(user, item_ids[static_cast<std::size_t>(i)], s);
    }
  }

  const Index total = spec.arrivals > 0 ? spec.arrivals : spec.users;
  std::vector<Index> visitors(static_cast<std::size_t>(spec.users));
  std::iota(visitors.begin(), visitors.end(), Index{0});
  std::shuffle(visitors.begin(), visitors.end(), arrival_rng);
  if (total < spec.users) {
    visitors.resize(static_cast<std::size_t>(total));
  } else {
    std::uniform_int_distribution<Index> pick(0, spec.users - 1);
    while (static_cast<Index>(visitors.size()) < total) visitors.push_back(pick(arrival_rng));
  }

  const std::vector<Index> counts =
      traffic_counts(total, spec.intervals, spec.traffic_pattern, traffic_rng);
  std::vector<ArrivalSchedule::Arrival> arrivals;
  arrivals.reserve(static_cast<std::size_t>(total));
  std::size_t next = 0;
  for (Index n = 0; n < spec.intervals; ++n) {
    for (Index j = 0; j < counts[static_cast<std::size_t>(n)]; ++j) {
      arrivals.push_back({n + 1, padded('u', visitors[next++], spec.users)});
    }
  }

  return {std::move(store).build(), std::move(catalog).build(),
          ArrivalSchedule(std::move(arrivals), spec.intervals)};
}

ScoreDistribution parse_score_distribution(std::string_view text) {
  if (text == "uniform") return ScoreDistribution::uniform;
  if (text == "beta" || text == "beta-skewed" || text == "beta_skewed") {
    return ScoreDistribution::beta_skewed;
  }
  throw ParseError("score distribution must be uniform|beta-skewed");
}

TrafficPattern parse_traffic_pattern(std::string_view text) {
  if (text == "constant") return TrafficPattern::constant;
  if (text == "sinusoidal") return TrafficPattern::sinusoidal;
  if (text == "bursty") return TrafficPattern::bursty;
  throw ParseError("traffic pattern must be constant|sinusoidal|bursty");
}

}  // namespace bankfair
