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

// Session logs, metric tables and frontier tables on disk.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bankfair/session.hpp"

namespace bankfair {

/// One JSON object per decision
/// `{t, interval, user_id, items, ndcg, z_prime, objective}`, then a summary
/// object carrying `"summary": true` and the metrics.
void write_log(std::ostream& out, const SessionLog& log, const Dataset& dataset);
void write_log(const std::filesystem::path& path, const SessionLog& log, const Dataset& dataset);

/// Decisions of a stored log. Throws ParseError naming the first bad line,
/// including a missing summary, and ValidationError for unknown ids.
std::vector<Decision> read_log(const std::filesystem::path& path, const Dataset& dataset);

/// `metric,K,value` rows for NDCG, ESP, Gini, MMR and Var.
void write_metrics(std::ostream& out, const MetricsSummary& metrics);
void write_metrics(const std::filesystem::path& path, const MetricsSummary& metrics);

/// `provider_id,interval,demand,allocation,estate_before`, one row per
/// provider per planned interval.
void write_plans(std::ostream& out, const std::vector<AllocationPlan>& plans,
                 const ProviderCatalog& catalog);

/// `t,provider_id,mu`.
void write_duals(std::ostream& out, const std::vector<DualSample>& duals,
                 const ProviderCatalog& catalog);

struct FrontierRow {
  double lambda = 0.0;
  double delta = 0.0;
  Index repetition = 0;
  MetricsSummary metrics;
};

/// `lambda,delta,ndcg_mean,esp,gini,mmr,var`.
void write_frontier(std::ostream& out, const std::vector<FrontierRow>& rows);

}  // namespace bankfair
