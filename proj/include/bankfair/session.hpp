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

// A full run over the horizon: plan each interval with the bankruptcy
// allocator, serve its arrivals with the chosen policy, then score the run.

#pragma once

#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "bankfair/bankruptcy.hpp"
#include "bankfair/config.hpp"
#include "bankfair/domain.hpp"
#include "bankfair/metrics.hpp"
#include "bankfair/reranker.hpp"

namespace bankfair {

/// Validated inputs with the store's item axis in catalog order.
struct Dataset {
  PreferenceStore store;
  ProviderCatalog catalog;
  ArrivalSchedule schedule;
  std::vector<Index> arrival_users;  // store user index per arrival

  /// Throws ValidationError with the report text if validation fails.
  static Dataset assemble(const PreferenceStore& store, const ProviderCatalog& catalog,
                          const ArrivalSchedule& schedule, MeritMode merit = MeritMode::size);
};

enum class Policy { bankfair_plus, bankfair_linear, topk, greedy_min_exposure };

Policy parse_policy(std::string_view text);
std::string_view to_string(Policy policy);

struct Decision {
  Index t = 0;  // 1-based over the session
  Index interval = 0;
  Index user = 0;
  std::vector<Index> items;
  double ndcg = 0.0;
  double z_prime = 0.0;
  double objective = 0.0;
};

struct DualSample {
  Index t = 0;
  Vector mu;
};

struct MetricsSummary {
  Index K = 0;
  double ndcg_mean = 0.0;
  double esp = 0.0;
  double gini = 0.0;
  double mmr = 0.0;
  double var = 0.0;
};

struct SessionOptions {
  bool record_duals = false;
};

struct SessionLog {
  Policy policy = Policy::bankfair_plus;
  RunConfig config;
  FairnessSpec fairness;
  std::vector<Decision> decisions;
  std::vector<AllocationPlan> plans;
  std::vector<DualSample> duals;
  ExposureLedger ledger;
  MetricsSummary metrics;
  double runtime_seconds = 0.0;
};

/// Horizon N: config.N when set, else the schedule's interval count.
Index horizon_of(const Dataset& dataset, const RunConfig& config);

/// m_p = beta * gamma_p / sum(gamma) * (arrivals * sum_k p(k)).
FairnessSpec fairness_for(const Dataset& dataset, const RunConfig& config);

/// Merit the interval's target exposure steers toward. Each provider wants
/// its minimum M_n plus a merit share of whatever the interval's exposure
/// `budget` leaves over; the result goes on the simplex and is mixed with
/// `floor` of the catalog merit share so no entry is zero.
Vector interval_merit(const AllocationPlan& plan, const Vector& merit, double budget,
                      double floor);

struct IntervalOutcome {
  std::vector<Decision> decisions;
  Vector earned;  // E_{., n}
  std::vector<DualSample> duals;
};

/// Serves `users` (store indices) in order. `first_t` numbers the first
/// decision. `state` should hold mu = 0 on entry.
IntervalOutcome run_interval(Index n, std::span<const Index> users, const AllocationPlan& plan,
                             DualState& state, const Dataset& dataset, const RunConfig& config,
                             Policy policy, std::mt19937_64& rng, Index first_t = 1,
                             const SessionOptions& options = {});

SessionLog run_session(const Dataset& dataset, const RunConfig& config, Policy policy,
                       const SessionOptions& options = {});

/// Scores stored decisions from scratch. Used both at the end of a session
/// and when re-evaluating a saved log, so the two agree bit for bit.
MetricsSummary evaluate(const Dataset& dataset, std::span<const Decision> decisions,
                        const FairnessSpec& fairness, Index K, ExposureLedger* ledger = nullptr);

}  // namespace bankfair
