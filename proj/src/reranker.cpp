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

#include "bankfair/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bankfair/metrics.hpp"

namespace bankfair {

namespace {

constexpr Index kMaxExactItems = 12;
constexpr Index kMaxExactK = 4;
constexpr int kMaxRefinePasses = 200;

struct Problem {
  std::span<const double> scores;
  std::span<const Index> owners;
  const Vector& mu;
  const SlateOptions& options;
  double q_star;
  Vector weights;  // p(1..K)

  double price(Index item) const { return mu[owners[static_cast<std::size_t>(item)]]; }
  double score(Index item) const { return scores[static_cast<std::size_t>(item)]; }
  double value(double q, double cost) const {
    return (1.0 - options.lambda) * options.scale * satisfaction_value(q, q_star, options) - cost;
  }
};

struct Candidate {
  std::vector<Index> items;
  double q = 0.0;
  double cost = 0.0;
  double objective = 0.0;
};

Candidate evaluate(const Problem& pb, std::vector<Index> items) {
  Candidate c;
  for (std::size_t k = 0; k < items.size(); ++k) {
    c.q += pb.weights[static_cast<Index>(k)] * pb.score(items[k]);
    c.cost += pb.weights[static_cast<Index>(k)] * pb.price(items[k]);
  }
  c.objective = pb.value(c.q, c.cost);
  c.items = std::move(items);
  return c;
}

bool improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-15 * std::max(1.0, std::abs(incumbent));
}

void enumerate(const Problem& pb, Index n, std::vector<Index>& prefix, std::vector<char>& used,
               Candidate& best, bool& have) {
  if (static_cast<Index>(prefix.size()) == pb.options.K) {
    Candidate c = evaluate(pb, prefix);
    if (!have || c.objective > best.objective) {
      best = std::move(c);
      have = true;
    }
    return;
  }
  for (Index i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    used[static_cast<std::size_t>(i)] = 1;
    prefix.push_back(i);
    enumerate(pb, n, prefix, used, best, have);
    prefix.pop_back();
    used[static_cast<std::size_t>(i)] = 0;
  }
}

// Items by score, descending, ties to the lower index.
std::vector<Index> score_order(std::span<const double> scores) {
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  return order;
}

// Swaps and single-slot replacements until no move helps. Replacements only
// consider each provider's best unused item: a lower-scored item of the same
// provider costs the same and adds less quality.
void refine(const Problem& pb, const std::vector<Index>& by_score, Index providers,
            Candidate& current) {
  const Index K = pb.options.K;
  std::vector<char> in_slate(pb.scores.size(), 0);
  for (Index i : current.items) in_slate[static_cast<std::size_t>(i)] = 1;

  std::vector<Index> best_unused(static_cast<std::size_t>(providers));
  for (int pass = 0; pass < kMaxRefinePasses; ++pass) {
    std::fill(best_unused.begin(), best_unused.end(), Index{-1});
    Index missing = providers;
    for (Index i : by_score) {
      if (missing == 0) break;
      if (in_slate[static_cast<std::size_t>(i)]) continue;
      Index& slot = best_unused[static_cast<std::size_t>(pb.owners[static_cast<std::size_t>(i)])];
      if (slot < 0) {
        slot = i;
        --missing;
      }
    }

    double best_value = current.objective;
    double best_q = current.q;
    double best_cost = current.cost;
    Index move_a = -1;
    Index move_b = -1;
    Index move_item = -1;

    for (Index a = 0; a < K; ++a) {
      const Index ia = current.items[static_cast<std::size_t>(a)];
      for (Index b = a + 1; b < K; ++b) {
        const Index ib = current.items[static_cast<std::size_t>(b)];
        const double dw = pb.weights[a] - pb.weights[b];
        const double q = current.q + dw * (pb.score(ib) - pb.score(ia));
        const double cost = current.cost + dw * (pb.price(ib) - pb.price(ia));
        const double v = pb.value(std::max(0.0, q), cost);
        if (improves(v, best_value)) {
          best_value = v;
          best_q = q;
          best_cost = cost;
          move_a = a;
          move_b = b;
          move_item = -1;
        }
      }
      for (Index item : best_unused) {
        if (item < 0) continue;
        const double q = current.q + pb.weights[a] * (pb.score(item) - pb.score(ia));
        const double cost = current.cost + pb.weights[a] * (pb.price(item) - pb.price(ia));
        const double v = pb.value(std::max(0.0, q), cost);
        if (improves(v, best_value)) {
          best_value = v;
          best_q = q;
          best_cost = cost;
          move_a = a;
          move_b = -1;
          move_item = item;
        }
      }
    }
    if (move_a < 0) return;
    auto& items = current.items;
    if (move_item >= 0) {
      in_slate[static_cast<std::size_t>(items[static_cast<std::size_t>(move_a)])] = 0;
      in_slate[static_cast<std::size_t>(move_item)] = 1;
      items[static_cast<std::size_t>(move_a)] = move_item;
    } else {
      std::swap(items[static_cast<std::size_t>(move_a)], items[static_cast<std::size_t>(move_b)]);
    }
    current.q = best_q;
    current.cost = best_cost;
    current.objective = best_value;
  }
}

Candidate solve_parametric(const Problem& pb, std::vector<Index> ideal) {
  const Index K = pb.options.K;
  const Index providers = pb.mu.size();
  const std::vector<Index> by_score = score_order(pb.scores);

  // Any optimum uses, per provider, that provider's best items, so the
  // per-provider top K is a sufficient candidate pool.
  std::vector<Index> pool;
  {
    std::vector<Index> taken(static_cast<std::size_t>(providers), 0);
    for (Index i : by_score) {
      Index& count = taken[static_cast<std::size_t>(pb.owners[static_cast<std::size_t>(i)])];
      if (count < K) {
        ++count;
        pool.push_back(i);
      }
    }
    std::sort(pool.begin(), pool.end());
  }

  Candidate best = evaluate(pb, std::move(ideal));

  const double gain = (1.0 - pb.options.lambda) * pb.options.scale;
  std::vector<double> grid;
  if (gain > 0.0 && pb.q_star > 0.0) {
    double lo;
    double hi;
    if (pb.options.satisfaction == Satisfaction::linear) {
      lo = hi = gain / pb.q_star;
    } else {
      lo = gain * satisfaction_slope(pb.q_star, pb.q_star, pb.options);
      hi = gain * satisfaction_slope(0.0, pb.q_star, pb.options);
    }
    const Index points = lo < hi ? pb.options.scan_points : 1;
    if (points == 1) {
      grid.push_back(std::sqrt(lo * hi));
    } else {
      const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
      for (Index j = 0; j < points; ++j) grid.push_back(lo * std::exp(ratio * static_cast<double>(j)));
    }
  } else {
    grid.push_back(0.0);
  }

  std::vector<Index> order(pool.size());
  std::vector<double> key(pb.scores.size());
  for (double w : grid) {
    for (Index i : pool) key[static_cast<std::size_t>(i)] = w * pb.score(i) - pb.price(i);
    order = pool;
    std::partial_sort(order.begin(), order.begin() + K, order.end(), [&](Index a, Index b) {
      const double ka = key[static_cast<std::size_t>(a)];
      const double kb = key[static_cast<std::size_t>(b)];
      return ka > kb || (ka == kb && a < b);
    });
    order.resize(static_cast<std::size_t>(K));
    Candidate c = evaluate(pb, order);
    if (c.objective > best.objective) best = std::move(c);
  }

  if (pb.options.refine) {
    refine(pb, by_score, providers, best);
    best = evaluate(pb, std::move(best.items));
  }
  return best;
}

}  // namespace

double satisfaction_slope(double q, double q_star, const SlateOptions& options) {
  if (options.satisfaction == Satisfaction::linear) return q_star > 0.0 ? 1.0 / q_star : 0.0;
  const double a = options.anchor_rate > 0.0 ? options.anchor_rate : options.delta;
  return anchored_satisfaction_slope(q, q_star, options.delta, a);
}

double satisfaction_value(double q, double q_star, const SlateOptions& options) {
  const double clamped = std::clamp(q, 0.0, q_star);
  if (options.satisfaction == Satisfaction::linear) return linear_satisfaction(clamped, q_star);
  if (options.anchor_rate > 0.0 && options.anchor_rate != options.delta) {
    return anchored_satisfaction(clamped, q_star, options.delta, options.anchor_rate);
  }
  return normalized_satisfaction(clamped, q_star, options.delta);
}

double slate_objective(std::span<const Index> items, std::span<const double> scores,
                       std::span<const Index> owners, const Vector& mu, double q_star,
                       const SlateOptions& options) {
  Problem pb{scores, owners, mu, options, q_star, position_weights(static_cast<Index>(items.size()))};
  return evaluate(pb, std::vector<Index>(items.begin(), items.end())).objective;
}

SlateDecision solve_slate(std::span<const double> scores, std::span<const Index> owners,
                          const Vector& mu, const SlateOptions& options) {
  const Index n = static_cast<Index>(scores.size());
  const Index K = options.K;
  if (K < 1) throw std::invalid_argument("solve_slate: K must be >= 1");
  if (n < K) {
    throw std::invalid_argument("solve_slate: need at least K=" + std::to_string(K) +
                                " items, have " + std::to_string(n));
  }
  if (owners.size() != scores.size()) throw std::invalid_argument("solve_slate: owners size");
  for (Index p : owners) {
    if (p < 0 || p >= mu.size()) throw std::invalid_argument("solve_slate: owner out of range");
  }

  const Eigen::Map<const Vector> row(scores.data(), n);
  std::vector<Index> ideal = ideal_items(row, K);
  const double q_star = dcg(std::span<const Index>(ideal), row);
  Problem pb{scores, owners, mu, options, q_star, position_weights(K)};

  Candidate best;
  if (options.mode == SolverMode::exact) {
    if (n > kMaxExactItems || K > kMaxExactK) {
      throw std::invalid_argument("solve_slate: exact mode needs <= 12 items and K <= 4");
    }
    std::vector<Index> prefix;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    bool have = false;
    enumerate(pb, n, prefix, used, best, have);
  } else {
    best = solve_parametric(pb, std::move(ideal));
  }

  SlateDecision out;
  out.items = std::move(best.items);
  out.q = dcg(std::span<const Index>(out.items), row);
  out.q_star = q_star;
  out.z_prime = satisfaction_value(out.q, q_star, options);
  out.objective = best.objective;
  out.exposure_delta = Vector::Zero(mu.size());
  for (std::size_t k = 0; k < out.items.size(); ++k) {
    out.exposure_delta[owners[static_cast<std::size_t>(out.items[k])]] +=
        pb.weights[static_cast<Index>(k)];
  }
  return out;
}

SlateDecision solve_user_slate(Index user, const PreferenceStore& store,
                               const ProviderCatalog& catalog, const Vector& mu,
                               const SlateOptions& options) {
  if (store.item_count() != catalog.item_count()) {
    throw std::invalid_argument("solve_user_slate: store and catalog item axes differ");
  }
  const auto row = store.user_scores(user);
  return solve_slate(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
                     std::span<const Index>(catalog.owners()), mu, options);
}

namespace {

// Sorting-based Euclidean projection written into `out`; `sorted` is scratch.
void project_into(const Vector& v, Vector& out, Vector& sorted) {
  const Index n = v.size();
  sorted = v;
  std::sort(sorted.data(), sorted.data() + n, std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    running += sorted[j];
    const double t = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  out = (v.array() - theta).cwiseMax(0.0).matrix();
}

Vector normalized_merit(const Vector& gamma) {
  if (gamma.size() == 0) throw std::invalid_argument("target: no providers");
  if ((gamma.array() <= 0.0).any()) throw std::domain_error("target: merit must be positive");
  return gamma / gamma.sum();
}

double sample_variance(const Vector& x) {
  const Index n = x.size();
  if (n < 2) return 0.0;
  return (x.array() - x.mean()).square().sum() / static_cast<double>(n - 1);
}

// The target problem in x = e / share, where the variance term is isotropic:
// maximize lambda G'(Var(x)) + c^T x over {x >= 0, share^T x = 1}, c = mu * share.
class TargetProblem {
 public:
  TargetProblem(const Vector& mu, double lambda, const FuzzyParams& fuzzy, const Vector& share)
      : c_(mu.cwiseProduct(share)), lambda_(lambda), fuzzy_(fuzzy), share_(share) {
    const Index n = share.size();
    order_.resize(static_cast<std::size_t>(n));
    ratio_.resize(n);
  }

  double value(const Vector& x) const {
    return lambda_ * fairness_membership(sample_variance(x), fuzzy_.k_steep, fuzzy_.g0) + c_.dot(x);
  }

  void gradient(const Vector& x, Vector& out) const {
    const Index n = x.size();
    const double m = fairness_membership(sample_variance(x), fuzzy_.k_steep, fuzzy_.g0);
    const double scale = lambda_ * -fuzzy_.k_steep * m * (1.0 - m) * 2.0 / static_cast<double>(n - 1);
    out = (scale * (x.array() - x.mean())).matrix() + c_;
  }

  // Euclidean projection onto {x >= 0, share^T x = 1}: x = max(0, v - theta share).
  void project(const Vector& v, Vector& out) {
    const Index n = v.size();
    ratio_ = v.cwiseQuotient(share_);
    for (Index i = 0; i < n; ++i) order_[static_cast<std::size_t>(i)] = i;
    std::sort(order_.begin(), order_.end(), [&](Index l, Index r) { return ratio_[l] > ratio_[r]; });
    double sav = 0.0;
    double saa = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < order_.size(); ++j) {
      const Index i = order_[j];
      sav += share_[i] * v[i];
      saa += share_[i] * share_[i];
      theta = (sav - 1.0) / saa;
      if (j + 1 == order_.size() || theta >= ratio_[order_[j + 1]]) break;
    }
    out = (v - theta * share_).cwiseMax(0.0);
  }

 private:
  Vector c_;
  double lambda_;
  const FuzzyParams& fuzzy_;
  const Vector& share_;
  std::vector<Index> order_;
  Vector ratio_;
};

Vector dirichlet_point(Index n, std::mt19937_64& rng) {
  std::gamma_distribution<double> draw(1.0, 1.0);
  Vector v(n);
  for (Index p = 0; p < n; ++p) v[p] = draw(rng);
  const double total = v.sum();
  if (!(total > 0.0)) return Vector::Constant(n, 1.0 / static_cast<double>(n));
  return v / total;
}

}  // namespace

Vector project_to_simplex(const Vector& v) {
  if (v.size() == 0) throw std::invalid_argument("project_to_simplex: empty vector");
  Vector out;
  Vector scratch;
  project_into(v, out, scratch);
  return out;
}

double exposure_unfairness(const Vector& e, const Vector& gamma) {
  if (e.size() != gamma.size()) throw std::invalid_argument("unfairness: size mismatch");
  return sample_variance(e.cwiseQuotient(normalized_merit(gamma)));
}

double target_objective(const Vector& e, const Vector& mu, double lambda, const FuzzyParams& fuzzy,
                        const Vector& gamma) {
  if (e.size() != gamma.size() || mu.size() != gamma.size()) {
    throw std::invalid_argument("target_objective: size mismatch");
  }
  return lambda * fairness_membership(exposure_unfairness(e, gamma), fuzzy.k_steep, fuzzy.g0) +
         mu.dot(e);
}

Vector target_exposure(const Vector& mu, double lambda, const FuzzyParams& fuzzy,
                       const Vector& gamma, std::mt19937_64& rng, const TargetOptions& options,
                       const std::optional<Vector>& warm_start) {
  const Index n = gamma.size();
  if (mu.size() != n) throw std::invalid_argument("target_exposure: size mismatch");
  const Vector share = normalized_merit(gamma);
  if (n == 1) return Vector::Ones(1);
  Index top = 0;
  for (Index p = 1; p < n; ++p) {
    if (mu[p] > mu[top]) top = p;
  }
  const Vector vertex = Vector::Unit(n, top);
  if (lambda == 0.0) return vertex;

  // Once G' saturates the objective is linear and the best vertex wins, so
  // that vertex joins the usual starts.
  std::vector<Vector> starts;
  starts.push_back(share);
  starts.push_back(Vector::Constant(n, 1.0 / static_cast<double>(n)));
  starts.push_back(vertex);
  if (warm_start && warm_start->size() == n) starts.push_back(project_to_simplex(*warm_start));
  for (Index r = 0; r < options.random_starts; ++r) starts.push_back(dirichlet_point(n, rng));

  TargetProblem problem(mu, lambda, fuzzy, share);
  Vector grad(n);
  Vector next(n);
  Vector best;
  double best_value = 0.0;
  for (const Vector& start : starts) {
    Vector x = start.cwiseQuotient(share);
    double value = problem.value(x);
    double step = options.step;
    for (Index it = 0; it < options.iterations; ++it) {
      problem.gradient(x, grad);
      problem.project(x + step * grad, next);
      const double next_value = problem.value(next);
      if (next_value > value) {
        const double moved = (next - x).cwiseProduct(share).cwiseAbs().maxCoeff();
        const double gain = next_value - value;
        x.swap(next);
        value = next_value;
        step *= 1.5;
        if (moved < options.tolerance || gain < options.min_gain * std::max(1.0, std::abs(value))) break;
      } else {
        step /= 2.0;
        if (step < 1e-15) break;
      }
    }
    if (best.size() == 0 || value > best_value) {
      best = x.cwiseProduct(share);
      best_value = value;
    }
  }
  return best;
}

Vector subgradient(const SlateDecision& decision, const Vector& target) {
  if (decision.exposure_delta.size() != target.size()) {
    throw std::invalid_argument("subgradient: provider sets differ");
  }
  const double mass = position_weights(static_cast<Index>(decision.items.size())).sum();
  return target - decision.exposure_delta / mass;
}

Vector DualState::cumulative_share() const {
  const double total = cumulative_exposure.sum();
  if (!(total > 0.0)) return Vector::Zero(cumulative_exposure.size());
  return cumulative_exposure / total;
}

void dual_update(DualState& state, const Vector& g) {
  if (g.size() != state.mu.size()) throw std::invalid_argument("dual_update: size mismatch");
  state.mu -= (state.eta / 2.0) * g;
  ++state.t;
}

}  // namespace bankfair
