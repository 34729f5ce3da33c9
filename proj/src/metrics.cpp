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

#include "bankfair/metrics.hpp"

namespace bankfair {

double dcg(const Slate& slate, const PreferenceStore& store) {
  return dcg(std::span<const Index>(slate.items()), store.user_scores(slate.user()));
}

double ideal_dcg(Index user, const PreferenceStore& store, Index K) {
  return ideal_dcg(store.user_scores(user), K);
}

double ndcg(const Slate& slate, const PreferenceStore& store) {
  return ndcg_ratio(dcg(slate, store), ideal_dcg(slate.user(), store, slate.size()));
}

Vector ExposureLedger::normalized() const {
  const double sum = total();
  if (!(sum > 0.0)) return Vector::Zero(raw_.size());
  return raw_ / sum;
}

void ExposureLedger::add(Index provider, Index interval, double amount) {
  if (provider < 0 || provider >= raw_.size()) throw std::out_of_range("ledger: bad provider");
  if (interval < 1 || interval > per_interval_.cols()) throw std::out_of_range("ledger: bad interval");
  raw_[provider] += amount;
  per_interval_(provider, interval - 1) += amount;
}

ExposureLedger& ExposureLedger::operator+=(const ExposureLedger& other) {
  if (other.raw_.size() != raw_.size() || other.per_interval_.cols() != per_interval_.cols()) {
    throw std::invalid_argument("ledger shapes differ");
  }
  raw_ += other.raw_;
  per_interval_ += other.per_interval_;
  return *this;
}

void record_exposure(ExposureLedger& ledger, const Slate& slate, const ProviderCatalog& catalog,
                     Index interval) {
  const auto& items = slate.items();
  for (std::size_t k = 0; k < items.size(); ++k) {
    const Index item = items[k];
    if (item < 0 || item >= catalog.item_count()) {
      throw std::out_of_range("record_exposure: item " + std::to_string(item) + " not in catalog");
    }
    ledger.add(catalog.owner(item), interval, position_weight(static_cast<Index>(k) + 1));
  }
}

void QualityReport::add(Index user, double dcg_value, double ideal_value) {
  if (user < 0) throw std::out_of_range("QualityReport: negative user index");
  if (static_cast<std::size_t>(user) >= slot_.size()) {
    slot_.resize(static_cast<std::size_t>(user) + 1, -1);
  }
  Index& slot = slot_[static_cast<std::size_t>(user)];
  if (slot < 0) {
    slot = static_cast<Index>(entries_.size());
    entries_.push_back({user, dcg_value, ideal_value});
  } else {
    auto& e = entries_[static_cast<std::size_t>(slot)];
    e.dcg += dcg_value;
    e.ideal += ideal_value;
  }
}

Vector QualityReport::ndcg() const {
  Vector out(size());
  for (Index k = 0; k < size(); ++k) out[k] = entries_[static_cast<std::size_t>(k)].ndcg();
  return out;
}

double QualityReport::mean_ndcg() const {
  if (entries_.empty()) throw std::domain_error("mean NDCG of an empty report");
  return pairwise_sum(ndcg()) / static_cast<double>(size());
}

double mmr(std::span<const double> ndcg_values) {
  if (ndcg_values.empty()) throw std::domain_error("mmr: no users");
  const auto [lo, hi] = std::minmax_element(ndcg_values.begin(), ndcg_values.end());
  if (!(*hi > 0.0)) throw std::domain_error("mmr: maximum NDCG is zero");
  return *lo / *hi;
}

double mmr(const QualityReport& report) {
  const Vector v = report.ndcg();
  return mmr(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

double var_accuracy(std::span<const double> ndcg_values) {
  if (ndcg_values.size() < 2) throw std::domain_error("var_accuracy: needs at least two users");
  const Eigen::Map<const Vector> a(ndcg_values.data(), static_cast<Index>(ndcg_values.size()));
  const double n = static_cast<double>(a.size());
  // Shifting by the first value keeps equal inputs at exactly zero.
  const Vector d = (a.array() - a[0]).matrix();
  const double mean = pairwise_sum(d) / n;
  const Vector centered_sq = (d.array() - mean).square().matrix();
  return pairwise_sum(centered_sq) / n;
}

double var_accuracy(const QualityReport& report) {
  const Vector v = report.ndcg();
  return var_accuracy(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace bankfair
