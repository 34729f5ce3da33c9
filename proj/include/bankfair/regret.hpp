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

// Regret-aware user satisfaction and the two fuzzy membership functions.
//
// A user served a slate of quality q, whose best attainable quality is q*,
// perceives
//
//   Z(q) = V(q) + R(V(q) - V(q*)),   V(q) = q^alpha,
//   R(d) = 1 - exp(-delta * d).
//
// R is increasing and concave with R(0) = 0, so shortfalls below q* cost more
// the deeper they go. The satisfaction membership rescales Z onto [0, 1]
// between the empty-quality anchor Z(0) = 1 - exp(delta q*) and Z(q*) = q*.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bankfair {

struct RegretParams {
  double delta = 1.0;       // regret avoidance, > 0
  double alpha_risk = 1.0;  // risk aversion exponent; 1 = risk neutral
};

struct FuzzyParams {
  double lambda = 0.5;  // weight of provider fairness, in [0, 1]
  double k_steep = 10.0;
  double g0 = 1.0;  // unacceptable unfairness level
};

namespace detail {
inline constexpr double kExpClamp = 700.0;

template <typename Scalar>
Scalar clamped_exp(Scalar x) {
  return std::exp(std::clamp(x, Scalar(-kExpClamp), Scalar(kExpClamp)));
}

template <typename Scalar>
void check_quality(Scalar q, Scalar q_star) {
  if (!(q >= Scalar(0))) throw std::domain_error("quality must be non-negative");
  if (q > q_star) throw std::domain_error("quality exceeds the ideal reference");
}
}  // namespace detail

template <typename Scalar>
Scalar utility(Scalar q, Scalar alpha_risk = Scalar(1)) {
  if (!(q >= Scalar(0))) throw std::domain_error("utility: quality must be non-negative");
  return alpha_risk == Scalar(1) ? q : std::pow(q, alpha_risk);
}

template <typename Scalar>
Scalar utility(Scalar q, const RegretParams& params) {
  return utility(q, Scalar(params.alpha_risk));
}

/// R = 1 - exp(-delta (q - q*)); zero at q = q*, negative below.
template <typename Scalar>
Scalar regret_rejoice(Scalar q, Scalar q_star, Scalar delta) {
  detail::check_quality(q, q_star);
  return Scalar(1) - detail::clamped_exp(-delta * (q - q_star));
}

/// Z = q + 1 - exp(-delta (q - q*)).
template <typename Scalar>
Scalar perceived_satisfaction(Scalar q, Scalar q_star, Scalar delta) {
  return utility(q) + regret_rejoice(q, q_star, delta);
}

/// Z' = (Z(q) - Z(0)) / (Z(q*) - Z(0)) in [0, 1]; 1 when q* = 0.
///
/// Evaluated after dividing through by exp(delta q*):
///   Z' = (q e^{-delta q*} - expm1(-delta q)) / (q* e^{-delta q*} - expm1(-delta q*)),
/// which cannot overflow and hits both anchors exactly.
template <typename Scalar>
Scalar normalized_satisfaction(Scalar q, Scalar q_star, Scalar delta) {
  if (q_star == Scalar(0)) {
    if (q != Scalar(0)) detail::check_quality(q, q_star);
    return Scalar(1);
  }
  detail::check_quality(q, q_star);
  const Scalar decay = std::exp(-delta * q_star);
  return (q * decay - std::expm1(-delta * q)) / (q_star * decay - std::expm1(-delta * q_star));
}

/// dZ'/dq; positive and decreasing on [0, q*].
template <typename Scalar>
Scalar normalized_satisfaction_slope(Scalar q, Scalar q_star, Scalar delta) {
  if (q_star == Scalar(0)) return Scalar(0);
  const Scalar decay = std::exp(-delta * q_star);
  return (decay + delta * std::exp(-delta * q)) / (q_star * decay - std::expm1(-delta * q_star));
}

/// Z' with the lower anchor taken as Z(0) = 1 - exp(a q*) for a free rate a.
/// a = delta gives normalized_satisfaction; a = 1 reproduces the form printed
/// with the equivalence theorem, which keeps Z'(q*) = 1 but lets Z' go
/// negative when delta > 1. Scaled by exp(-a q*) for the same reason as above.
template <typename Scalar>
Scalar anchored_satisfaction(Scalar q, Scalar q_star, Scalar delta, Scalar anchor_rate) {
  if (q_star == Scalar(0)) {
    if (q != Scalar(0)) detail::check_quality(q, q_star);
    return Scalar(1);
  }
  detail::check_quality(q, q_star);
  const Scalar decay = std::exp(-anchor_rate * q_star);
  const Scalar shift = std::clamp(delta * (q_star - q) - anchor_rate * q_star,
                                  Scalar(-detail::kExpClamp), Scalar(detail::kExpClamp));
  return (q * decay - std::expm1(shift)) / (q_star * decay - std::expm1(-anchor_rate * q_star));
}

template <typename Scalar>
Scalar anchored_satisfaction_slope(Scalar q, Scalar q_star, Scalar delta, Scalar anchor_rate) {
  if (q_star == Scalar(0)) return Scalar(0);
  const Scalar decay = std::exp(-anchor_rate * q_star);
  const Scalar shift = delta * (q_star - q) - anchor_rate * q_star;
  return (decay + delta * detail::clamped_exp(shift)) /
         (q_star * decay - std::expm1(-anchor_rate * q_star));
}

/// Regret-free variant: Z' = q / q* (the delta -> 0 limit).
template <typename Scalar>
Scalar linear_satisfaction(Scalar q, Scalar q_star) {
  if (q_star == Scalar(0)) return Scalar(1);
  detail::check_quality(q, q_star);
  return q / q_star;
}

/// G' = 1 - 1 / (1 + exp(-k (G - g0/2))); decreasing, 1/2 at G = g0/2.
template <typename Scalar>
Scalar fairness_membership(Scalar unfairness, Scalar k_steep, Scalar g0) {
  if (!(unfairness >= Scalar(0))) throw std::domain_error("unfairness must be non-negative");
  const Scalar x = k_steep * (unfairness - g0 / Scalar(2));
  // 1 - sigmoid(x) == sigmoid(-x)
  return Scalar(1) / (Scalar(1) + detail::clamped_exp(x));
}

template <typename Scalar>
Scalar fairness_membership(Scalar unfairness, const FuzzyParams& params) {
  return fairness_membership(unfairness, Scalar(params.k_steep), Scalar(params.g0));
}

/// Piecewise-linear membership the sigmoid smooths: 1 at or below g_best,
/// 0 at or above g_worst, linear in between.
template <typename Scalar>
Scalar fairness_membership_piecewise(Scalar unfairness, Scalar g_best, Scalar g_worst) {
  if (unfairness <= g_best) return Scalar(1);
  if (unfairness >= g_worst) return Scalar(0);
  return (g_worst - unfairness) / (g_worst - g_best);
}

}  // namespace bankfair
