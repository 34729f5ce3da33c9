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

#include "bankfair/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "text_io.hpp"

namespace bankfair {

Index IdMap::intern(const std::string& id) {
  auto [it, inserted] = lookup_.try_emplace(id, size());
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::optional<Index> IdMap::find(const std::string& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// PreferenceStore

void PreferenceStore::Builder::add(const std::string& user, const std::string& item,
                                   double score) {
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw ValidationError("score for (" + user + ", " + item + ") outside [0, 1]: " +
                          format_double(score));
  }
  entries_.push_back({users_.intern(user), items_.intern(item), score});
}

PreferenceStore PreferenceStore::Builder::build() && {
  PreferenceStore store;
  store.users_ = std::move(users_);
  store.items_ = std::move(items_);
  const Index rows = store.users_.size();
  const Index cols = store.items_.size();
  store.scores_ = ScoreMatrix::Zero(rows, cols);
  store.observed_.assign(static_cast<std::size_t>(rows * cols), 0);
  for (const Entry& e : entries_) {
    auto& seen = store.observed_[static_cast<std::size_t>(e.user * cols + e.item)];
    if (seen) {
      ++store.duplicate_rows_;
    } else {
      seen = 1;
      ++store.entry_count_;
    }
    store.scores_(e.user, e.item) = e.score;
  }
  return store;
}

double PreferenceStore::score(const std::string& user, const std::string& item) const {
  auto u = users_.find(user);
  auto i = items_.find(item);
  if (!u || !i) return 0.0;
  return scores_(*u, *i);
}

PreferenceStore PreferenceStore::with_item_order(
    const std::vector<std::string>& item_order) const {
  Builder builder;
  for (const auto& user : users_.ids()) builder.add_user(user);
  for (const auto& item : item_order) builder.add_item(item);
  PreferenceStore out = std::move(builder).build();
  if (out.items_.size() != static_cast<Index>(item_order.size())) {
    throw ValidationError("item order contains duplicate ids");
  }
  std::vector<Index> column(static_cast<std::size_t>(item_count()));
  for (Index i = 0; i < item_count(); ++i) {
    auto target = out.items_.find(items_.id(i));
    if (!target) throw ValidationError("item '" + items_.id(i) + "' missing from item order");
    column[static_cast<std::size_t>(i)] = *target;
  }
  for (Index u = 0; u < user_count(); ++u) {
    for (Index i = 0; i < item_count(); ++i) {
      const Index j = column[static_cast<std::size_t>(i)];
      out.scores_(u, j) = scores_(u, i);
      out.observed_[static_cast<std::size_t>(u * out.item_count() + j)] =
          observed_[static_cast<std::size_t>(u * item_count() + i)];
    }
  }
  out.entry_count_ = entry_count_;
  out.duplicate_rows_ = duplicate_rows_;
  return out;
}

bool operator==(const PreferenceStore& a, const PreferenceStore& b) {
  if (a.user_count() != b.user_count() || a.item_count() != b.item_count() ||
      a.entry_count() != b.entry_count()) {
    return false;
  }
  for (Index u = 0; u < a.user_count(); ++u) {
    auto bu = b.users_.find(a.users_.id(u));
    if (!bu) return false;
    for (Index i = 0; i < a.item_count(); ++i) {
      auto bi = b.items_.find(a.items_.id(i));
      if (!bi) return false;
      if (a.observed(u, i) != b.observed(*bu, *bi)) return false;
      // Bit identity, not numeric tolerance.
      if (std::memcmp(&a.scores_(u, i), &b.scores_(*bu, *bi), sizeof(double)) != 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// ProviderCatalog

void ProviderCatalog::Builder::add(const std::string& item, const std::string& provider) {
  const Index p = providers_.intern(provider);
  auto existing = items_.find(item);
  if (existing) {
    const Index current = owner_[static_cast<std::size_t>(*existing)];
    if (current != p) {
      throw ValidationError("item '" + item + "' listed under providers '" +
                            providers_.id(current) + "' and '" + provider + "'");
    }
    return;
  }
  items_.intern(item);
  owner_.push_back(p);
}

void ProviderCatalog::Builder::set_merit(const std::string& provider, double merit) {
  if (!std::isfinite(merit) || merit < 0.0) {
    throw ValidationError("merit for provider '" + provider + "' must be non-negative");
  }
  auto [it, inserted] = merit_override_.try_emplace(provider, merit);
  if (!inserted && it->second != merit) {
    throw ValidationError("conflicting merit values for provider '" + provider + "'");
  }
}

ProviderCatalog ProviderCatalog::Builder::build() && {
  ProviderCatalog catalog;
  catalog.items_ = std::move(items_);
  catalog.providers_ = std::move(providers_);
  catalog.owner_ = std::move(owner_);
  const Index P = catalog.providers_.size();
  catalog.sizes_.assign(static_cast<std::size_t>(P), 0);
  for (Index p : catalog.owner_) ++catalog.sizes_[static_cast<std::size_t>(p)];

  catalog.merit_.resize(P);
  if (merit_override_.empty()) {
    const double total = static_cast<double>(catalog.items_.size());
    for (Index p = 0; p < P; ++p) {
      catalog.merit_[p] = static_cast<double>(catalog.sizes_[static_cast<std::size_t>(p)]) / total;
    }
  } else {
    for (Index p = 0; p < P; ++p) {
      auto it = merit_override_.find(catalog.providers_.id(p));
      if (it == merit_override_.end()) {
        throw ValidationError("merit override missing for provider '" +
                              catalog.providers_.id(p) + "'");
      }
      catalog.merit_[p] = it->second;
    }
    catalog.merit_overridden_ = true;
  }
  return catalog;
}

ProviderCatalog ProviderCatalog::with_merit(const Vector& merit) const {
  if (merit.size() != provider_count()) {
    throw std::invalid_argument("with_merit: expected one merit value per provider");
  }
  if ((merit.array() < 0.0).any() || !merit.allFinite()) {
    throw ValidationError("merit values must be finite and non-negative");
  }
  ProviderCatalog copy = *this;
  copy.merit_ = merit;
  copy.merit_overridden_ = true;
  return copy;
}

// ---------------------------------------------------------------------------
// ArrivalSchedule

ArrivalSchedule::ArrivalSchedule(std::vector<Arrival> arrivals, Index interval_count)
    : arrivals_(std::move(arrivals)) {
  Index last = 1;
  Index largest = 0;
  for (std::size_t k = 0; k < arrivals_.size(); ++k) {
    const Index n = arrivals_[k].interval;
    if (n < 1) throw ValidationError("arrival interval must be >= 1");
    if (n < last) {
      throw ValidationError("arrival intervals must be non-decreasing (row " +
                            std::to_string(k + 1) + ")");
    }
    last = n;
    largest = std::max(largest, n);
  }
  if (interval_count == 0) interval_count = largest;
  if (largest > interval_count) {
    throw ValidationError("arrival interval exceeds interval count " +
                          std::to_string(interval_count));
  }
  interval_count_ = interval_count;
  traffic_.assign(static_cast<std::size_t>(interval_count_), 0);
  for (const auto& a : arrivals_) ++traffic_[static_cast<std::size_t>(a.interval - 1)];
  offsets_.assign(static_cast<std::size_t>(interval_count_) + 1, 0);
  for (Index n = 0; n < interval_count_; ++n) {
    offsets_[static_cast<std::size_t>(n) + 1] =
        offsets_[static_cast<std::size_t>(n)] + static_cast<std::size_t>(traffic_[static_cast<std::size_t>(n)]);
  }
}

std::span<const ArrivalSchedule::Arrival> ArrivalSchedule::interval(Index n) const {
  if (n < 1 || n > interval_count_) throw std::out_of_range("interval index out of range");
  const auto begin = offsets_[static_cast<std::size_t>(n - 1)];
  const auto end = offsets_[static_cast<std::size_t>(n)];
  return std::span<const Arrival>(arrivals_).subspan(begin, end - begin);
}

// ---------------------------------------------------------------------------
// Slate

Slate::Slate(Index user, std::vector<Index> items) : user_(user), items_(std::move(items)) {
  std::vector<Index> sorted = items_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("slate items must be distinct");
  }
}

std::optional<Index> Slate::position_of(Index item) const {
  auto it = std::find(items_.begin(), items_.end(), item);
  if (it == items_.end()) return std::nullopt;
  return static_cast<Index>(it - items_.begin()) + 1;
}

// ---------------------------------------------------------------------------
// File formats

FileFormat format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? FileFormat::jsonl : FileFormat::csv;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

namespace {

using detail::for_each_record;
using detail::Record;

double parse_score(const std::string& text, std::size_t line) {
  double value = 0.0;
  if (!detail::parse_double(text, value)) {
    throw ParseError("invalid score '" + text + "'", line);
  }
  return value;
}

}  // namespace

PreferenceStore load_scores(const std::filesystem::path& path, FileFormat format) {
  PreferenceStore::Builder builder;
  for_each_record(path, format, {"user_id", "item_id", "score"}, {},
                  [&](const Record& r) {
                    const double score = parse_score(r.fields[2], r.line);
                    try {
                      builder.add(r.fields[0], r.fields[1], score);
                    } catch (const ValidationError& e) {
                      throw ValidationError("line " + std::to_string(r.line) + ": " + e.what());
                    }
                  });
  return std::move(builder).build();
}

PreferenceStore load_scores(const std::filesystem::path& path) {
  return load_scores(path, format_for(path));
}

ProviderCatalog load_catalog(const std::filesystem::path& path, FileFormat format) {
  ProviderCatalog::Builder builder;
  for_each_record(path, format, {"item_id", "provider_id"}, {"merit"}, [&](const Record& r) {
    try {
      builder.add(r.fields[0], r.fields[1]);
      if (r.fields.size() > 2 && !r.fields[2].empty()) {
        double merit = 0.0;
        if (!detail::parse_double(r.fields[2], merit)) {
          throw ParseError("invalid merit '" + r.fields[2] + "'", r.line);
        }
        builder.set_merit(r.fields[1], merit);
      }
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(r.line) + ": " + e.what());
    }
  });
  return std::move(builder).build();
}

ProviderCatalog load_catalog(const std::filesystem::path& path) {
  return load_catalog(path, format_for(path));
}

ArrivalSchedule load_arrivals(const std::filesystem::path& path, FileFormat format) {
  std::vector<ArrivalSchedule::Arrival> arrivals;
  for_each_record(path, format, {"interval", "user_id"}, {}, [&](const Record& r) {
    Index interval = 0;
    const auto& text = r.fields[0];
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), interval);
    if (ec != std::errc() || ptr != text.data() + text.size() || interval < 1) {
      throw ParseError("invalid interval '" + text + "'", r.line);
    }
    if (!arrivals.empty() && interval < arrivals.back().interval) {
      throw ValidationError("line " + std::to_string(r.line) +
                            ": arrival intervals must be non-decreasing");
    }
    arrivals.push_back({interval, r.fields[1]});
  });
  return ArrivalSchedule(std::move(arrivals));
}

ArrivalSchedule load_arrivals(const std::filesystem::path& path) {
  return load_arrivals(path, format_for(path));
}

void write_scores(const std::filesystem::path& path, const PreferenceStore& store,
                  FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (format == FileFormat::csv) out << "user_id,item_id,score\n";
  for (Index u = 0; u < store.user_count(); ++u) {
    for (Index i = 0; i < store.item_count(); ++i) {
      if (!store.observed(u, i)) continue;
      if (format == FileFormat::csv) {
        out << store.users().id(u) << ',' << store.items().id(i) << ','
            << format_double(store.score(u, i)) << '\n';
      } else {
        nlohmann::ordered_json row;
        row["user_id"] = store.users().id(u);
        row["item_id"] = store.items().id(i);
        row["score"] = store.score(u, i);
        out << row.dump() << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_catalog(const std::filesystem::path& path, const ProviderCatalog& catalog,
                   FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const bool merit = catalog.merit_overridden();
  if (format == FileFormat::csv) out << (merit ? "item_id,provider_id,merit\n" : "item_id,provider_id\n");
  for (Index i = 0; i < catalog.item_count(); ++i) {
    const Index p = catalog.owner(i);
    if (format == FileFormat::csv) {
      out << catalog.items().id(i) << ',' << catalog.providers().id(p);
      if (merit) out << ',' << format_double(catalog.merit()[p]);
      out << '\n';
    } else {
      nlohmann::ordered_json row;
      row["item_id"] = catalog.items().id(i);
      row["provider_id"] = catalog.providers().id(p);
      if (merit) row["merit"] = catalog.merit()[p];
      out << row.dump() << '\n';
    }
  }
}

void write_arrivals(const std::filesystem::path& path, const ArrivalSchedule& schedule,
                    FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (format == FileFormat::csv) out << "interval,user_id\n";
  for (const auto& a : schedule.arrivals()) {
    if (format == FileFormat::csv) {
      out << a.interval << ',' << a.user << '\n';
    } else {
      nlohmann::ordered_json row;
      row["interval"] = a.interval;
      row["user_id"] = a.user;
      out << row.dump() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Validation

std::string ValidationReport::describe() const {
  std::ostringstream os;
  os << (passed() ? "dataset ok" : "dataset invalid");
  if (!unknown_users.empty()) {
    os << "\n  arriving users without scores (" << unknown_users.size() << "):";
    for (std::size_t k = 0; k < std::min<std::size_t>(unknown_users.size(), 10); ++k) {
      os << ' ' << unknown_users[k];
    }
  }
  if (!unowned_items.empty()) {
    os << "\n  scored items without a provider (" << unowned_items.size() << "):";
    for (std::size_t k = 0; k < std::min<std::size_t>(unowned_items.size(), 10); ++k) {
      os << ' ' << unowned_items[k];
    }
  }
  os << "\n  traffic:";
  for (Index r : traffic) os << ' ' << r;
  return os.str();
}

ValidationReport validate_dataset(const PreferenceStore& store, const ProviderCatalog& catalog,
                                  const ArrivalSchedule& schedule) {
  ValidationReport report;
  report.traffic = schedule.traffic();
  std::unordered_set<std::string> reported;
  for (const auto& a : schedule.arrivals()) {
    if (!store.users().find(a.user) && reported.insert(a.user).second) {
      report.unknown_users.push_back(a.user);
    }
  }
  for (const auto& item : store.items().ids()) {
    if (!catalog.items().find(item)) report.unowned_items.push_back(item);
  }
  return report;
}

Vector relevance_merit(const ProviderCatalog& catalog, const PreferenceStore& store) {
  if (store.item_count() != catalog.item_count()) {
    throw std::invalid_argument("relevance_merit: store must be aligned to the catalog");
  }
  Vector mass = Vector::Zero(catalog.provider_count());
  const Eigen::RowVectorXd column_mass = store.scores().colwise().sum();
  for (Index i = 0; i < catalog.item_count(); ++i) mass[catalog.owner(i)] += column_mass[i];
  const double total = pairwise_sum(mass);
  if (!(total > 0.0)) throw ValidationError("relevance merit undefined: all scores are zero");
  return mass / total;
}

}  // namespace bankfair
