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

#include "bankfair/session.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

#include "bankfair/synthetic.hpp"

namespace bankfair {

Dataset Dataset::assemble(const PreferenceStore& store, const ProviderCatalog& catalog,
                          const ArrivalSchedule& schedule, MeritMode merit) {
  const ValidationReport report = validate_dataset(store, catalog, schedule);
  if (!report.passed()) throw ValidationError(report.describe());

  Dataset ds;
  ds.store = store.with_item_order(catalog.items().ids());
  ds.catalog = catalog;
  if (merit == MeritMode::relevance && !catalog.merit_overridden()) {
    ds.catalog = catalog.with_merit(relevance_merit(catalog, ds.store));
  }
  ds.schedule = schedule;
  ds.arrival_users.reserve(schedule.arrivals().size());
  for (const auto& a : schedule.arrivals()) ds.arrival_users.push_back(*ds.store.users().find(a.user));
  return ds;
}

Policy parse_policy(std::string_view text) {
  if (text == "bankfair_plus") return Policy::bankfair_plus;
  if (text == "bankfair_linear") return Policy::bankfair_linear;
  if (text == "topk") return Policy::topk;
  if (text == "greedy_min_exposure") return Policy::greedy_min_exposure;
  throw ParseError("policy must be bankfair_plus|bankfair_linear|topk|greedy_min_exposure");
}

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::bankfair_plus: return "bankfair_plus";
    case Policy::bankfair_linear: return "bankfair_linear";
    case Policy::topk: return "topk";
    case Policy::greedy_min_exposure: return "greedy_min_exposure";
  }
  return "?";
}

Index horizon_of(const Dataset& dataset, const RunConfig& config) {
  const Index seen = dataset.schedule.interval_count();
  if (config.N == 0) return std::max<Index>(seen, 1);
  if (config.N < seen) {
    throw ValidationError("N=" + std::to_string(config.N) + " but arrivals reach interval " +
                          std::to_string(seen));
  }
  return config.N;
}

FairnessSpec fairness_for(const Dataset& dataset, const RunConfig& config) {
  const double budget =
      static_cast<double>(dataset.schedule.size()) * position_weights(config.K).sum();
  return FairnessSpec::from_merit(dataset.catalog.merit(), config.beta_min, budget,
                                  horizon_of(dataset, config));
}

Vector interval_merit(const AllocationPlan& plan, const Vector& merit, double budget,
                      double floor) {
  const Vector base = merit / merit.sum();
  const Vector& minimum = plan.current_target;
  const double slack = std::max(0.0, budget - minimum.sum());
  const Vector wanted = minimum + slack * base;
  const double total = wanted.sum();
  if (!(total > 0.0)) return base;
  return (1.0 - floor) * wanted / total + floor * base;
}

namespace {

SlateOptions slate_options(const RunConfig& config, Policy policy, Index arrivals) {
  SlateOptions o;
  o.K = config.K;
  o.lambda = config.lambda;
  o.delta = config.delta;
  o.scale = config.decision_scale > 0.0 ? config.decision_scale
                                        : 1.0 / static_cast<double>(std::max<Index>(arrivals, 1));
  o.satisfaction = policy == Policy::bankfair_linear ? Satisfaction::linear : Satisfaction::regret;
  o.anchor_rate = config.anchor_rate;
  o.mode = config.solver_mode;
  o.scan_points = config.scan_points;
  o.refine = config.refine;
  return o;
}

// Relevance slate, then the provider furthest below its interval target (and
// not yet shown) takes the last slot with its best remaining item.
std::vector<Index> greedy_slate(std::span<const double> scores, const ProviderCatalog& catalog,
                                const Vector& deficit, Index K) {
  const Eigen::Map<const Vector> row(scores.data(), static_cast<Index>(scores.size()));
  std::vector<Index> items = ideal_items(row, K);
  std::vector<char> shown(static_cast<std::size_t>(catalog.provider_count()), 0);
  for (Index i : items) shown[static_cast<std::size_t>(catalog.owner(i))] = 1;

  Index needy = -1;
  for (Index p = 0; p < deficit.size(); ++p) {
    if (shown[static_cast<std::size_t>(p)] || !(deficit[p] > 0.0)) continue;
    if (needy < 0 || deficit[p] > deficit[needy]) needy = p;
  }
  if (needy < 0) return items;
  Index pick = -1;
  for (Index i = 0; i < row.size(); ++i) {
    if (catalog.owner(i) != needy) continue;
    if (pick < 0 || row[i] > row[pick]) pick = i;
  }
  if (pick >= 0) items.back() = pick;
  return items;
}

}  // namespace

IntervalOutcome run_interval(Index n, std::span<const Index> users, const AllocationPlan& plan,
                             DualState& state, const Dataset& dataset, const RunConfig& config,
                             Policy policy, std::mt19937_64& rng, Index first_t,
                             const SessionOptions& options) {
  const ProviderCatalog& catalog = dataset.catalog;
  const PreferenceStore& store = dataset.store;
  const Index P = catalog.provider_count();
  const Index K = config.K;
  const Vector weights = position_weights(K);

  IntervalOutcome out;
  out.earned = Vector::Zero(P);
  out.decisions.reserve(users.size());

  const SlateOptions opts = slate_options(config, policy, static_cast<Index>(users.size()));
  const FuzzyParams fuzzy{config.lambda, config.k_steep, config.g0};
  const double budget = static_cast<double>(users.size()) * weights.sum();
  const Vector gamma = interval_merit(plan, catalog.merit(), budget, config.target_floor);
  const bool dual_policy = policy == Policy::bankfair_plus || policy == Policy::bankfair_linear;

  std::optional<Vector> last_target;
  double max_g = 0.0;
  const Index t_start = state.t;
  Index t = first_t;
  for (Index user : users) {
    const auto row = store.user_scores(user);
    const std::span<const double> scores(row.data(), static_cast<std::size_t>(row.size()));
    Decision d;
    d.t = t++;
    d.interval = n;
    d.user = user;

    if (dual_policy) {
      // The stored dual is unscaled; lambda prices it, so lambda = 0 leaves
      // the satisfaction term alone.
      const Vector price = config.lambda * state.mu;
      SlateDecision sd = solve_slate(scores, std::span<const Index>(catalog.owners()), price, opts);
      const Vector target = target_exposure(price, config.lambda, fuzzy, gamma, rng, {}, last_target);
      const Vector g = subgradient(sd, target);
      dual_update(state, g);
      state.cumulative_exposure += sd.exposure_delta;
      last_target = target;

      max_g = std::max(max_g, g.cwiseAbs().maxCoeff());
      const double bound = (state.eta / 2.0) * static_cast<double>(state.t - t_start) * max_g;
      if (state.mu.cwiseAbs().maxCoeff() > bound * (1.0 + 1e-9) + 1e-12) {
        throw std::logic_error("dual prices left their growth bound");
      }
      d.items = std::move(sd.items);
      d.ndcg = ndcg_ratio(sd.q, sd.q_star);
      d.z_prime = sd.z_prime;
      d.objective = sd.objective;
    } else {
      const Eigen::Map<const Vector> map(scores.data(), row.size());
      if (policy == Policy::topk) {
        d.items = ideal_items(map, K);
      } else {
        d.items = greedy_slate(scores, catalog, plan.current_target - out.earned, K);
      }
      const double q = dcg(std::span<const Index>(d.items), map);
      const double q_star = ideal_dcg(map, K);
      d.ndcg = ndcg_ratio(q, q_star);
      d.z_prime = satisfaction_value(q, q_star, opts);
      d.objective = (1.0 - config.lambda) * opts.scale * d.z_prime;
      ++state.t;
    }
    for (std::size_t k = 0; k < d.items.size(); ++k) {
      out.earned[catalog.owner(d.items[k])] += weights[static_cast<Index>(k)];
    }
    if (options.record_duals) out.duals.push_back({d.t, state.mu});
    out.decisions.push_back(std::move(d));
  }
  return out;
}

SessionLog run_session(const Dataset& dataset, const RunConfig& config, Policy policy,
                       const SessionOptions& options) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const Index N = horizon_of(dataset, config);
  const Index P = dataset.catalog.provider_count();
  if (dataset.store.item_count() < config.K) {
    throw ValidationError("K=" + std::to_string(config.K) + " exceeds the " +
                          std::to_string(dataset.store.item_count()) + " available items");
  }

  SessionLog log;
  log.policy = policy;
  log.config = config;
  log.fairness = fairness_for(dataset, config);

  AllocatorOptions alloc;
  alloc.K = config.K;
  alloc.alpha_demand = config.alpha_demand;
  alloc.weighting = config.demand_weighting;
  alloc.forecast.method = config.forecast_method;
  alloc.forecast.period = config.seasonal_period;
  alloc.forecast.prior = config.forecast_prior > 0.0
                             ? config.forecast_prior
                             : static_cast<double>(dataset.schedule.size()) / static_cast<double>(N);
  BankruptcyAllocator allocator(log.fairness, dataset.catalog.merit(), alloc);

  auto rng = substream(config.seed, "target");
  const std::vector<Index>& traffic = dataset.schedule.traffic();
  std::size_t cursor = 0;
  Index next_t = 1;
  for (Index n = 1; n <= N; ++n) {
    const AllocationPlan& plan = allocator.begin_interval();
    const Index r = n <= static_cast<Index>(traffic.size()) ? traffic[static_cast<std::size_t>(n - 1)] : 0;
    const std::span<const Index> users(dataset.arrival_users.data() + cursor, static_cast<std::size_t>(r));
    cursor += static_cast<std::size_t>(r);

    DualState state(P, config.eta);  // prices restart at zero each interval
    IntervalOutcome outcome =
        run_interval(n, users, plan, state, dataset, config, policy, rng, next_t, options);
    next_t += r;
    allocator.close_interval(r, outcome.earned);
    for (auto& d : outcome.decisions) log.decisions.push_back(std::move(d));
    for (auto& s : outcome.duals) log.duals.push_back(std::move(s));
  }
  log.plans = allocator.plans();
  log.metrics = evaluate(dataset, log.decisions, log.fairness, config.K, &log.ledger);
  log.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return log;
}

MetricsSummary evaluate(const Dataset& dataset, std::span<const Decision> decisions,
                        const FairnessSpec& fairness, Index K, ExposureLedger* ledger_out) {
  if (decisions.empty()) throw ValidationError("no decisions to evaluate");
  Index N = dataset.schedule.interval_count();
  for (const auto& d : decisions) N = std::max(N, d.interval);

  ExposureLedger ledger(dataset.catalog.provider_count(), N);
  QualityReport quality;
  for (const auto& d : decisions) {
    const Slate slate(d.user, d.items);
    record_exposure(ledger, slate, dataset.catalog, d.interval);
    quality.add(d.user, dcg(slate, dataset.store), ideal_dcg(d.user, dataset.store, K));
  }

  MetricsSummary m;
  m.K = K;
  m.ndcg_mean = quality.mean_ndcg();
  m.esp = esp(ledger.raw(), fairness.min_total);
  m.gini = gini(ledger.raw(), dataset.catalog.merit());
  m.mmr = mmr(quality);
  m.var = quality.size() >= 2 ? var_accuracy(quality) : 0.0;
  if (ledger_out) *ledger_out = std::move(ledger);
  return m;
}

}  // namespace bankfair
