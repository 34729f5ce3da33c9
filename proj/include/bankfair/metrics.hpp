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

// Ranking quality and exposure-fairness metrics.
//
// Exposure of provider p accumulates p(k) = 1/log2(k+1) for every slate
// position k holding one of its items. Quality of a slate is its DCG with the
// same discount; NDCG divides by the DCG of the user's ideal top-K.

#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "bankfair/core.hpp"
#include "bankfair/domain.hpp"

namespace bankfair {

/// DCG of `items` (in rank order) under one user's score row.
template <typename Derived>
typename Derived::Scalar dcg(std::span<const Index> items,
                             const Eigen::DenseBase<Derived>& user_scores) {
  using Scalar = typename Derived::Scalar;
  Scalar q(0);
  for (std::size_t k = 0; k < items.size(); ++k) {
    q += position_weight<Scalar>(static_cast<Index>(k) + 1) * user_scores.coeff(items[k]);
  }
  return q;
}

/// The K highest-scoring items, descending; ties go to the lower index.
template <typename Derived>
std::vector<Index> ideal_items(const Eigen::DenseBase<Derived>& user_scores, Index K) {
  const Index n = user_scores.size();
  if (K > n) {
    throw std::invalid_argument("ideal slate needs at least K=" + std::to_string(K) +
                                " items, have " + std::to_string(n));
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + K, order.end(), [&](Index a, Index b) {
    const auto sa = user_scores.coeff(a);
    const auto sb = user_scores.coeff(b);
    return sa > sb || (sa == sb && a < b);
  });
  order.resize(static_cast<std::size_t>(K));
  return order;
}

template <typename Derived>
typename Derived::Scalar ideal_dcg(const Eigen::DenseBase<Derived>& user_scores, Index K) {
  const auto items = ideal_items(user_scores, K);
  return dcg(std::span<const Index>(items), user_scores);
}

/// q / q*, with 1 when the ideal is 0.
template <typename Scalar>
Scalar ndcg_ratio(Scalar q, Scalar q_ideal) {
  return q_ideal > Scalar(0) ? q / q_ideal : Scalar(1);
}

double dcg(const Slate& slate, const PreferenceStore& store);
double ideal_dcg(Index user, const PreferenceStore& store, Index K);
double ndcg(const Slate& slate, const PreferenceStore& store);

/// Realized exposure per provider, in total and per interval.
class ExposureLedger {
 public:
  ExposureLedger() = default;
  ExposureLedger(Index providers, Index intervals)
      : raw_(Vector::Zero(providers)), per_interval_(Matrix::Zero(providers, intervals)) {}

  Index provider_count() const { return raw_.size(); }
  Index interval_count() const { return per_interval_.cols(); }

  /// e_p, summed over all intervals.
  const Vector& raw() const { return raw_; }
  /// E_{p,n}; column n-1 holds interval n.
  const Matrix& per_interval() const { return per_interval_; }
  auto interval(Index n) const { return per_interval_.col(n - 1); }
  double total() const { return pairwise_sum(raw_); }
  /// Shares on the provider simplex; all zeros when nothing was recorded.
  Vector normalized() const;

  void add(Index provider, Index interval, double amount);
  ExposureLedger& operator+=(const ExposureLedger& other);

 private:
  Vector raw_;
  Matrix per_interval_;
};

/// Adds p(k) to owner(item_k) for every position of `slate`.
void record_exposure(ExposureLedger& ledger, const Slate& slate, const ProviderCatalog& catalog,
                     Index interval);

/// Per-user accuracy. Repeat visits accumulate DCG and ideal DCG.
class QualityReport {
 public:
  struct Entry {
    Index user;
    double dcg;
    double ideal;
    double ndcg() const { return ndcg_ratio(dcg, ideal); }
  };

  void add(Index user, double dcg_value, double ideal_value);
  const std::vector<Entry>& entries() const { return entries_; }
  Index size() const { return static_cast<Index>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  Vector ndcg() const;
  double mean_ndcg() const;

 private:
  std::vector<Entry> entries_;
  std::vector<Index> slot_;  // user index -> position in entries_, -1 if absent
};

/// Fraction of providers whose exposure meets their minimum.
template <typename DerivedE, typename DerivedM>
double esp(const Eigen::MatrixBase<DerivedE>& exposure, const Eigen::MatrixBase<DerivedM>& minimum) {
  if (exposure.size() != minimum.size()) {
    throw std::invalid_argument("esp: exposure and minimum sizes differ");
  }
  if (exposure.size() == 0) return 0.0;
  const Index met = (exposure.array() >= minimum.array()).count();
  return static_cast<double>(met) / static_cast<double>(exposure.size());
}

/// Gini index of merit-normalized exposure e_p / gamma_p over ordered pairs,
/// divided by 2 |P| sum_p e_p / gamma_p.
template <typename DerivedE, typename DerivedG>
typename DerivedE::Scalar gini(const Eigen::MatrixBase<DerivedE>& exposure,
                               const Eigen::MatrixBase<DerivedG>& merit) {
  using Scalar = typename DerivedE::Scalar;
  if (exposure.size() != merit.size()) throw std::invalid_argument("gini: size mismatch");
  if ((merit.array() <= Scalar(0)).any()) throw std::domain_error("gini: merit must be positive");
  VectorX<Scalar> x = exposure.cwiseQuotient(merit);
  const Scalar total = pairwise_sum(x);
  if (!(total > Scalar(0))) throw std::domain_error("gini: total exposure is zero");
  std::sort(x.data(), x.data() + x.size());
  // sum_{i,j} |x_i - x_j| = 2 sum_i (2i - n - 1) x_(i), i 1-based over sorted x.
  const Index n = x.size();
  VectorX<Scalar> terms(n);
  for (Index i = 0; i < n; ++i) terms[i] = Scalar(2 * (i + 1) - n - 1) * x[i];
  const Scalar pair_sum = Scalar(2) * pairwise_sum(terms);
  return pair_sum / (Scalar(2) * Scalar(n) * total);
}

/// min NDCG / max NDCG across users.
double mmr(std::span<const double> ndcg_values);
double mmr(const QualityReport& report);

/// (1/n^2) sum_{k<l} (a_k - a_l)^2, i.e. the population variance of a.
double var_accuracy(std::span<const double> ndcg_values);
double var_accuracy(const QualityReport& report);

}  // namespace bankfair
