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

// Dataset-facing types: relevance scores, the item -> provider catalog, the
// user arrival schedule and slates. Opaque string ids are interned to dense
// indices on ingestion; everything downstream works on indices.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bankfair/core.hpp"

namespace bankfair {

/// Insertion-ordered string id <-> dense index map.
class IdMap {
 public:
  Index intern(const std::string& id);
  std::optional<Index> find(const std::string& id) const;
  const std::string& id(Index index) const { return ids_.at(static_cast<std::size_t>(index)); }
  Index size() const { return static_cast<Index>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> lookup_;
};

/// Relevance scores s(u, i) in [0, 1]. Unobserved pairs read as 0.
class PreferenceStore {
 public:
  class Builder {
   public:
    Index add_user(const std::string& user) { return users_.intern(user); }
    Index add_item(const std::string& item) { return items_.intern(item); }
    /// Throws ValidationError when the score is outside [0, 1] or not finite.
    void add(const std::string& user, const std::string& item, double score);
    PreferenceStore build() &&;

   private:
    struct Entry {
      Index user;
      Index item;
      double score;
    };
    IdMap users_;
    IdMap items_;
    std::vector<Entry> entries_;
  };

  PreferenceStore() = default;

  Index user_count() const { return users_.size(); }
  Index item_count() const { return items_.size(); }
  /// Distinct observed (user, item) pairs.
  Index entry_count() const { return entry_count_; }
  /// Rows that overwrote an earlier row for the same pair.
  Index duplicate_rows() const { return duplicate_rows_; }

  const IdMap& users() const { return users_; }
  const IdMap& items() const { return items_; }

  double score(Index user, Index item) const { return scores_(user, item); }
  double score(const std::string& user, const std::string& item) const;
  bool observed(Index user, Index item) const {
    return observed_[static_cast<std::size_t>(user * item_count() + item)] != 0;
  }
  const ScoreMatrix& scores() const { return scores_; }
  auto user_scores(Index user) const { return scores_.row(user); }

  /// Same content with the item axis laid out in `item_order`. Items absent
  /// from the store become all-zero columns; every store item must appear.
  PreferenceStore with_item_order(const std::vector<std::string>& item_order) const;

  /// Content equality by id: same users, items and bit-identical observed scores.
  friend bool operator==(const PreferenceStore& a, const PreferenceStore& b);

 private:
  IdMap users_;
  IdMap items_;
  ScoreMatrix scores_;
  std::vector<unsigned char> observed_;
  Index entry_count_ = 0;
  Index duplicate_rows_ = 0;
};

/// Total single-valued item -> provider map with per-provider merit.
class ProviderCatalog {
 public:
  class Builder {
   public:
    /// Throws ValidationError if the item was already listed under another provider.
    void add(const std::string& item, const std::string& provider);
    /// Explicit merit for a provider; conflicting values throw.
    void set_merit(const std::string& provider, double merit);
    ProviderCatalog build() &&;

   private:
    IdMap items_;
    IdMap providers_;
    std::vector<Index> owner_;
    std::unordered_map<std::string, double> merit_override_;
  };

  ProviderCatalog() = default;

  Index item_count() const { return items_.size(); }
  Index provider_count() const { return providers_.size(); }
  const IdMap& items() const { return items_; }
  const IdMap& providers() const { return providers_; }

  Index owner(Index item) const { return owner_.at(static_cast<std::size_t>(item)); }
  const std::vector<Index>& owners() const { return owner_; }
  Index items_owned(Index provider) const { return sizes_.at(static_cast<std::size_t>(provider)); }

  /// gamma_p; |I_p| / |I| unless overridden.
  const Vector& merit() const { return merit_; }
  bool merit_overridden() const { return merit_overridden_; }

  /// Copy with merit replaced (e.g. by relevance mass); size must match.
  ProviderCatalog with_merit(const Vector& merit) const;

 private:
  IdMap items_;
  IdMap providers_;
  std::vector<Index> owner_;
  std::vector<Index> sizes_;
  Vector merit_;
  bool merit_overridden_ = false;
};

/// Users arriving over N intervals, in arrival order.
class ArrivalSchedule {
 public:
  struct Arrival {
    Index interval;  // 1-based
    std::string user;
  };

  ArrivalSchedule() = default;
  /// Throws ValidationError on decreasing or out-of-range intervals. An
  /// `interval_count` of 0 means "the largest interval seen".
  explicit ArrivalSchedule(std::vector<Arrival> arrivals, Index interval_count = 0);

  Index interval_count() const { return interval_count_; }
  Index size() const { return static_cast<Index>(arrivals_.size()); }
  const std::vector<Arrival>& arrivals() const { return arrivals_; }

  /// r_n for n = 1..N (index n - 1).
  const std::vector<Index>& traffic() const { return traffic_; }
  /// Arrivals of interval n (1-based).
  std::span<const Arrival> interval(Index n) const;

 private:
  std::vector<Arrival> arrivals_;
  std::vector<Index> traffic_;
  std::vector<std::size_t> offsets_;
  Index interval_count_ = 0;
};

/// Ordered top-K list for one user; items are distinct.
class Slate {
 public:
  Slate() = default;
  /// Throws std::invalid_argument on repeated items.
  Slate(Index user, std::vector<Index> items);

  Index user() const { return user_; }
  const std::vector<Index>& items() const { return items_; }
  Index size() const { return static_cast<Index>(items_.size()); }
  /// sigma(i): 1-based position of `item`, if present.
  std::optional<Index> position_of(Index item) const;

  friend bool operator==(const Slate&, const Slate&) = default;

 private:
  Index user_ = 0;
  std::vector<Index> items_;
};

enum class FileFormat { csv, jsonl };

/// Picks jsonl for *.jsonl / *.json paths, csv otherwise.
FileFormat format_for(const std::filesystem::path& path);

/// `user_id,item_id,score` rows. Duplicate pairs: last write wins.
PreferenceStore load_scores(const std::filesystem::path& path, FileFormat format);
PreferenceStore load_scores(const std::filesystem::path& path);

/// `item_id,provider_id[,merit]` rows.
ProviderCatalog load_catalog(const std::filesystem::path& path, FileFormat format);
ProviderCatalog load_catalog(const std::filesystem::path& path);

/// `interval,user_id` rows, intervals 1-based and non-decreasing.
ArrivalSchedule load_arrivals(const std::filesystem::path& path, FileFormat format);
ArrivalSchedule load_arrivals(const std::filesystem::path& path);

void write_scores(const std::filesystem::path& path, const PreferenceStore& store,
                  FileFormat format = FileFormat::csv);
void write_catalog(const std::filesystem::path& path, const ProviderCatalog& catalog,
                   FileFormat format = FileFormat::csv);
void write_arrivals(const std::filesystem::path& path, const ArrivalSchedule& schedule,
                    FileFormat format = FileFormat::csv);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

struct ValidationReport {
  std::vector<std::string> unknown_users;   // arriving users with no scores
  std::vector<std::string> unowned_items;   // scored items missing from the catalog
  std::vector<Index> traffic;               // r_n
  bool passed() const { return unknown_users.empty() && unowned_items.empty(); }
  std::string describe() const;
};

ValidationReport validate_dataset(const PreferenceStore& store, const ProviderCatalog& catalog,
                                  const ArrivalSchedule& schedule);

/// Merit as each provider's share of total relevance mass in `store`.
/// The store's item axis must follow the catalog's item order.
Vector relevance_merit(const ProviderCatalog& catalog, const PreferenceStore& store);

}  // namespace bankfair
