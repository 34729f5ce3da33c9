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

// Online re-ranking by dual mirror descent.
//
// Each arriving user gets the slate maximizing
//
//   (1 - lambda) * scale * Z'(q(X)) - sum_k p(k) mu[owner(i_k)],
//
// where mu prices provider exposure. The prices then move toward the target
// exposure e_t = argmax_{e in simplex} lambda G'(Var(e / gamma)) + mu^T e by
// one proximal step mu <- mu - (eta / 2) (e_t - realized share).

#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "bankfair/config.hpp"
#include "bankfair/core.hpp"
#include "bankfair/domain.hpp"
#include "bankfair/regret.hpp"

namespace bankfair {

enum class Satisfaction { regret, linear };

struct SlateOptions {
  Index K = 10;
  double lambda = 0.5;
  double delta = 1.0;
  double scale = 1.0;  // per-decision weight of the satisfaction term
  Satisfaction satisfaction = Satisfaction::regret;
  double anchor_rate = 0.0;  // lower anchor Z(0) = 1 - exp(a q*); 0 means a = delta
  SolverMode mode = SolverMode::parametric;
  Index scan_points = 32;
  bool refine = true;
};

struct SlateDecision {
  std::vector<Index> items;  // rank order
  double q = 0.0;            // achieved DCG
  double q_star = 0.0;       // ideal DCG
  double z_prime = 0.0;
  double objective = 0.0;
  Vector exposure_delta;     // sum_k p(k) per owning provider
};

/// Inner problem over one user's score row. `owners[i]` is the provider of
/// item i; `mu` has one entry per provider.
///
/// `exact` enumerates every ordered K-subset and needs at most 12 items and
/// K <= 4. `parametric` scans tangent weights w and sorts by w s_i - mu_p,
/// then (with `refine`) hill-climbs with swaps and replacements.
SlateDecision solve_slate(std::span<const double> scores, std::span<const Index> owners,
                          const Vector& mu, const SlateOptions& options);

/// Convenience over a dataset whose store columns follow catalog item order.
SlateDecision solve_user_slate(Index user, const PreferenceStore& store,
                               const ProviderCatalog& catalog, const Vector& mu,
                               const SlateOptions& options);

/// Value of the inner objective for a given slate.
double slate_objective(std::span<const Index> items, std::span<const double> scores,
                       std::span<const Index> owners, const Vector& mu, double q_star,
                       const SlateOptions& options);

/// Satisfaction Z'(q) under the chosen variant, and its derivative in q.
double satisfaction_value(double q, double q_star, const SlateOptions& options);
double satisfaction_slope(double q, double q_star, const SlateOptions& options);

/// Euclidean projection onto {e >= 0, sum e = 1}.
Vector project_to_simplex(const Vector& v);

/// Sample variance of e / gamma with gamma rescaled to sum to one.
double exposure_unfairness(const Vector& e, const Vector& gamma);

struct TargetOptions {
  Index iterations = 500;
  double step = 0.05;
  Index random_starts = 3;  // Dirichlet draws on top of the merit and uniform starts
  double tolerance = 1e-13;  // stop once a step moves e less than this
  double min_gain = 1e-12;   // or raises the objective by less than this, relatively
};

/// lambda G'(Var(e / gamma)) + mu^T e.
double target_objective(const Vector& e, const Vector& mu, double lambda, const FuzzyParams& fuzzy,
                        const Vector& gamma);

/// Maximizer of target_objective over the simplex. lambda = 0 returns the
/// vertex of the largest price. Otherwise projected gradient ascent runs from
/// gamma, the uniform point, that vertex, `warm_start` if given and random
/// Dirichlet draws.
Vector target_exposure(const Vector& mu, double lambda, const FuzzyParams& fuzzy,
                       const Vector& gamma, std::mt19937_64& rng,
                       const TargetOptions& options = {},
                       const std::optional<Vector>& warm_start = std::nullopt);

/// g_t = e_t - exposure_delta / sum_k p(k).
Vector subgradient(const SlateDecision& decision, const Vector& target);

struct DualState {
  Vector mu;
  double eta = 0.05;
  Index t = 0;
  Vector cumulative_exposure;  // raw sum of exposure_delta

  DualState() = default;
  DualState(Index providers, double step)
      : mu(Vector::Zero(providers)), eta(step), cumulative_exposure(Vector::Zero(providers)) {}

  /// Realized exposure on the simplex; zeros before the first decision.
  Vector cumulative_share() const;
};

/// mu <- mu - (eta / 2) g, t <- t + 1.
void dual_update(DualState& state, const Vector& g);

}  // namespace bankfair
