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

// Random instance generators and slow reference implementations shared by
// the unit tests and the acceptance runner. The oracles work straight from
// the definitions and deliberately share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "bankfair/core.hpp"
#include "bankfair/domain.hpp"
#include "bankfair/regret.hpp"

namespace bankfair::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(rng_);
  }
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  std::vector<double> reals(Index n, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  Vector vector(Index n, double lo, double hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Vector normals(Index n, double sd = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal(0.0, sd);
    return v;
  }
  // Owners for n items over p providers, every provider owning at least one.
  std::vector<Index> owners(Index n, Index p) {
    std::vector<Index> o(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) o[static_cast<std::size_t>(i)] = i < p ? i : integer(0, p - 1);
    std::shuffle(o.begin(), o.end(), rng_);
    return o;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// 1 / log2(k + 1), computed through the natural log.
inline double ref_weight(Index k) { return std::log(2.0) / std::log(static_cast<double>(k) + 1.0); }

inline double ref_dcg(const std::vector<Index>& items, const std::vector<double>& scores) {
  double q = 0.0;
  for (std::size_t k = 0; k < items.size(); ++k) q += ref_weight(static_cast<Index>(k) + 1) * scores[items[k]];
  return q;
}

// Best DCG by trying every ordered K-subset.
inline double ref_ideal_dcg(const std::vector<double>& scores, Index K) {
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double q = 0.0;
  for (Index k = 0; k < K; ++k) q += ref_weight(k + 1) * sorted[static_cast<std::size_t>(k)];
  return q;
}

// Double sum over ordered pairs.
inline double ref_gini(const std::vector<double>& e, const std::vector<double>& gamma) {
  const std::size_t n = e.size();
  double pairs = 0.0;
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    total += e[a] / gamma[a];
    for (std::size_t b = 0; b < n; ++b) pairs += std::abs(e[a] / gamma[a] - e[b] / gamma[b]);
  }
  return pairs / (2.0 * static_cast<double>(n) * total);
}

inline double ref_var(const std::vector<double>& a) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) s += (a[k] - a[l]) * (a[k] - a[l]);
  }
  return s / static_cast<double>(n * n);
}

inline double ref_esp(const std::vector<double>& e, const std::vector<double>& m) {
  std::size_t met = 0;
  for (std::size_t p = 0; p < e.size(); ++p) met += e[p] >= m[p] ? 1 : 0;
  return static_cast<double>(met) / static_cast<double>(e.size());
}

// Constrained equal awards by water filling over sorted claims.
inline std::vector<double> ref_cea(double estate, const std::vector<double>& claims) {
  std::vector<std::size_t> order(claims.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return claims[a] < claims[b]; });
  std::vector<double> out(claims.size(), 0.0);
  double left = estate;
  std::size_t remaining = claims.size();
  for (std::size_t j = 0; j < order.size(); ++j, --remaining) {
    const double share = left / static_cast<double>(remaining);
    const double c = claims[order[j]];
    if (c <= share) {
      out[order[j]] = c;
      left -= c;
    } else {
      for (std::size_t r = j; r < order.size(); ++r) out[order[r]] = share;
      break;
    }
  }
  return out;
}

// Talmud: CEA on half claims below the half sum; above it, each claim less
// a CEA split of the total loss over the half claims.
inline std::vector<double> ref_talmud(double estate, const std::vector<double>& claims) {
  std::vector<double> half(claims.size());
  double total = 0.0;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    half[i] = claims[i] / 2.0;
    total += claims[i];
  }
  if (estate <= total / 2.0) return ref_cea(estate, half);
  std::vector<double> loss = ref_cea(total - estate, half);
  for (std::size_t i = 0; i < claims.size(); ++i) loss[i] = claims[i] - loss[i];
  return loss;
}

// Inner objective from its definition, with the satisfaction variant passed in.
struct SlateProblem {
  std::vector<double> scores;
  std::vector<Index> owners;
  Vector mu;
  Index K = 1;
  double weight = 1.0;  // (1 - lambda) * scale
  std::function<double(double, double)> satisfaction;

  double objective(const std::vector<Index>& items) const {
    const double q = ref_dcg(items, scores);
    const double q_star = ref_ideal_dcg(scores, K);
    double price = 0.0;
    for (std::size_t k = 0; k < items.size(); ++k) {
      price += ref_weight(static_cast<Index>(k) + 1) * mu[owners[items[k]]];
    }
    return weight * satisfaction(std::min(q, q_star), q_star) - price;
  }
};

// Best objective over every ordered K-subset.
inline double ref_best_slate(const SlateProblem& problem, std::vector<Index>* best_items = nullptr) {
  const Index n = static_cast<Index>(problem.scores.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Index> current;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::function<void()> walk = [&] {
    if (static_cast<Index>(current.size()) == problem.K) {
      const double v = problem.objective(current);
      if (v > best) {
        best = v;
        if (best_items) *best_items = current;
      }
      return;
    }
    for (Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      used[static_cast<std::size_t>(i)] = 1;
      current.push_back(i);
      walk();
      current.pop_back();
      used[static_cast<std::size_t>(i)] = 0;
    }
  };
  walk();
  return best;
}

// Two-provider target objective on a dense grid over e_1 in [0, 1].
inline double ref_target_grid(double mu1, double mu2, double lambda, double k, double g0,
                              double gamma1, double gamma2, Index points) {
  const double s1 = gamma1 / (gamma1 + gamma2);
  const double s2 = gamma2 / (gamma1 + gamma2);
  double best = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j <= points; ++j) {
    const double e1 = static_cast<double>(j) / static_cast<double>(points);
    const double x1 = e1 / s1;
    const double x2 = (1.0 - e1) / s2;
    const double var = (x1 - x2) * (x1 - x2) / 2.0;  // sample variance of two values
    const double member = 1.0 - 1.0 / (1.0 + std::exp(-k * (var - g0 / 2.0)));
    best = std::max(best, lambda * member + mu1 * e1 + mu2 * (1.0 - e1));
  }
  return best;
}

// Small in-memory marketplace: scores[u][i], owners[i], arrivals as
// (interval, user) pairs.
inline PreferenceStore make_store(const std::vector<std::vector<double>>& scores) {
  PreferenceStore::Builder b;
  for (std::size_t u = 0; u < scores.size(); ++u) {
    b.add_user("u" + std::to_string(u));
    for (std::size_t i = 0; i < scores[u].size(); ++i) {
      b.add("u" + std::to_string(u), "i" + std::to_string(i), scores[u][i]);
    }
  }
  return std::move(b).build();
}

inline ProviderCatalog make_catalog(const std::vector<Index>& owners) {
  ProviderCatalog::Builder b;
  for (std::size_t i = 0; i < owners.size(); ++i) {
    b.add("i" + std::to_string(i), "p" + std::to_string(owners[i]));
  }
  return std::move(b).build();
}

inline ArrivalSchedule make_schedule(const std::vector<std::pair<Index, Index>>& arrivals,
                                     Index intervals = 0) {
  std::vector<ArrivalSchedule::Arrival> list;
  for (const auto& [n, u] : arrivals) list.push_back({n, "u" + std::to_string(u)});
  return ArrivalSchedule(std::move(list), intervals);
}

}  // namespace bankfair::testing
