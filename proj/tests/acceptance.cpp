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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bankfair/bankruptcy.hpp"
#include "bankfair/io.hpp"
#include "bankfair/metrics.hpp"
#include "bankfair/regret.hpp"
#include "bankfair/reranker.hpp"
#include "bankfair/session.hpp"
#include "bankfair/synthetic.hpp"
#include "support.hpp"

using namespace bankfair;
using bankfair::testing::Gen;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

const Dataset& reference_dataset() {
  static const Dataset ds = [] {
    SyntheticSpec spec;  // 1000 users, 500 items, 20 providers, Zipf 1, 8 sinusoidal intervals
    spec.seed = 42;
    const SyntheticDataset d = generate_dataset(spec);
    return Dataset::assemble(d.store, d.catalog, d.schedule);
  }();
  return ds;
}

RunConfig reference_config(double lambda, double delta = 1.0) {
  RunConfig c;
  c.K = 10;
  c.seed = 42;
  c.lambda = lambda;
  c.delta = delta;
  return c;
}

Outcome talmud_suite() {
  const auto start = Clock::now();
  Vector claims(3);
  claims << 100, 200, 300;
  const double want[3][3] = {{100.0 / 3, 100.0 / 3, 100.0 / 3}, {50, 75, 75}, {50, 100, 150}};
  double classic = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vector a = talmud_allocate(100.0 * (e + 1), claims);
    for (int i = 0; i < 3; ++i) classic = std::max(classic, std::abs(a[i] - want[e][i]));
  }
  Gen gen(101);
  double exhaustion = 0.0, duality = 0.0, bound = 0.0, order = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    const Index n = gen.integer(1, 10);
    const Vector d = gen.vector(n, 0.0, 1000.0);
    const double total = d.sum();
    const double estate = gen.uniform(0.0, total);
    const Vector a = talmud_allocate(estate, d);
    exhaustion = std::max(exhaustion, std::abs(a.sum() - estate));
    duality = std::max(duality, (a - (d - talmud_allocate(total - estate, d))).cwiseAbs().maxCoeff());
    bound = std::max(bound, std::max((-a).maxCoeff(), (a - d).maxCoeff()));
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (d[i] <= d[j]) order = std::max(order, a[i] - a[j]);
      }
    }
  }
  const double secs = seconds_since(start);
  const bool pass = classic <= 1e-9 && exhaustion <= 1e-9 && duality <= 1e-9 && bound <= 1e-9 &&
                    order <= 1e-9 && secs < 5.0;
  return {pass, fmt("classic err %.2e, exhaustion %.2e, self-duality %.2e, bounds %.2e, order %.2e "
                    "over 10000 instances in %.2fs",
                    classic, exhaustion, duality, bound, order, secs)};
}

Outcome regret_suite() {
  double slope_err = 0.0, curve_err = 0.0;
  bool signs = true;
  for (double delta : {0.5, 1.0, 2.0}) {
    const double q_star = 2.0;
    for (int j = 1; j <= 1000; ++j) {
      const double q = q_star * (j - 0.5) / 1000.0;
      const double h = 1e-4;
      const double up = std::min(q + h, q_star);
      const double dn = q - h;
      const double mid = (up + dn) / 2.0;
      const double span = (up - dn) / 2.0;
      const double fd1 = (regret_rejoice(up, q_star, delta) - regret_rejoice(dn, q_star, delta)) / (2 * span);
      const double fd2 = (regret_rejoice(up, q_star, delta) - 2 * regret_rejoice(mid, q_star, delta) +
                          regret_rejoice(dn, q_star, delta)) / (span * span);
      const double d1 = delta * std::exp(-delta * (mid - q_star));
      const double d2 = -delta * delta * std::exp(-delta * (mid - q_star));
      slope_err = std::max(slope_err, std::abs(fd1 - d1) / std::abs(d1));
      curve_err = std::max(curve_err, std::abs(fd2 - d2) / std::abs(d2));
      signs = signs && d1 > 0 && d2 < 0 && fd1 > 0 && fd2 < 0;
    }
  }
  const bool zero = regret_rejoice(1.7, 1.7, 3.0) == 0.0;
  double anchor = 0.0;
  Gen gen(102);
  for (int rep = 0; rep < 1000; ++rep) {
    const double q_star = gen.uniform(1e-3, 10.0);
    const double delta = std::exp(gen.uniform(-6.0, 3.0));
    anchor = std::max(anchor, std::abs(normalized_satisfaction(0.0, q_star, delta)));
    anchor = std::max(anchor, std::abs(normalized_satisfaction(q_star, q_star, delta) - 1.0));
  }
  double limit = 0.0;
  for (double q_star : {0.5, 1.0, 3.0}) {
    for (int j = 0; j <= 1000; ++j) {
      const double q = q_star * j / 1000.0;
      limit = std::max(limit, std::abs(normalized_satisfaction(q, q_star, 1e-4) - q / q_star));
    }
  }
  const bool pass = zero && signs && slope_err <= 1e-6 && curve_err <= 1e-6 && anchor <= 1e-12 && limit < 1e-3;
  return {pass, fmt("R(0)=0 %s, R'>0 R''<0 %s, rel err R' %.2e R'' %.2e, anchor err %.2e, "
                    "gap to q/q* at delta=1e-4 %.2e",
                    zero ? "yes" : "no", signs ? "yes" : "no", slope_err, curve_err, anchor, limit)};
}

Outcome degenerate_lambda() {
  std::vector<std::pair<const Dataset*, std::string>> sets;
  sets.push_back({&reference_dataset(), "reference"});
  std::vector<Dataset> extra;
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    SyntheticSpec spec;
    spec.users = 150;
    spec.items = 60 + 20 * static_cast<Index>(seed);
    spec.providers = 5 + static_cast<Index>(seed);
    spec.score_distribution = seed % 2 ? ScoreDistribution::uniform : ScoreDistribution::beta_skewed;
    spec.traffic_pattern = TrafficPattern::bursty;
    spec.arrivals = 400;
    spec.seed = seed;
    const SyntheticDataset d = generate_dataset(spec);
    extra.push_back(Dataset::assemble(d.store, d.catalog, d.schedule));
  }
  for (const auto& d : extra) sets.push_back({&d, "extra"});
  std::size_t mismatched = 0, total = 0;
  double worst = 1.0;
  for (const auto& [ds, name] : sets) {
    for (double delta : {0.1, 1.0, 5.0}) {
      const RunConfig c = reference_config(0.0, delta);
      const SessionLog plus = run_session(*ds, c, Policy::bankfair_plus);
      const SessionLog top = run_session(*ds, c, Policy::topk);
      for (std::size_t i = 0; i < plus.decisions.size(); ++i) {
        mismatched += plus.decisions[i].items != top.decisions[i].items;
      }
      total += plus.decisions.size();
      worst = std::min(worst, plus.metrics.ndcg_mean);
    }
  }
  return {mismatched == 0 && worst == 1.0,
          fmt("%zu of %zu slates differ from topk, lowest mean NDCG %.17g", mismatched, total, worst)};
}

Outcome inner_oracle() {
  const auto start = Clock::now();
  Gen gen(104);
  int below = 0;
  double worst_gap = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Index n = gen.integer(2, 8);
    const Index P = gen.integer(1, std::min<Index>(3, n));
    const Index K = gen.integer(1, std::min<Index>(3, n));
    testing::SlateProblem p;
    p.scores = gen.reals(n, 0.0, 1.0);
    p.owners = gen.owners(n, P);
    p.mu = gen.normals(P);
    p.K = K;
    SlateOptions o;
    o.K = K;
    o.lambda = 0.5;
    o.delta = 1.0;
    o.anchor_rate = 1.0;
    o.scale = 1.0;
    p.weight = (1.0 - o.lambda) * o.scale;
    p.satisfaction = [](double q, double q_star) { return anchored_satisfaction(q, q_star, 1.0, 1.0); };
    const double best = testing::ref_best_slate(p);
    const SlateDecision d = solve_slate(std::span<const double>(p.scores), std::span<const Index>(p.owners), p.mu, o);
    const double got = p.objective(d.items);
    // got >= 0.999 best, read as a shortfall of at most 0.1% of |best| since objectives can be negative.
    const double gap = best - got;
    worst_gap = std::max(worst_gap, gap / std::max(std::abs(best), 1e-300));
    if (gap > 1e-3 * std::abs(best)) ++below;
  }
  const double secs = seconds_since(start);
  return {below == 0 && secs < 30.0,
          fmt("%d of 1000 instances below 0.999 of enumeration, worst relative gap %.2e, %.2fs", below,
              std::max(worst_gap, 0.0), secs)};
}

Outcome target_oracle() {
  Gen gen(105);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Vector mu = gen.normals(2, 0.3);
    const double lambda = gen.uniform(0.0, 1.0);
    const FuzzyParams f{lambda, gen.uniform(0.5, 20.0), gen.uniform(0.05, 2.0)};
    Vector g = gen.vector(2, 0.05, 1.0);
    const Vector e = target_exposure(mu, lambda, f, g, gen.engine());
    const double got = target_objective(e, mu, lambda, f, g);
    const double grid = testing::ref_target_grid(mu[0], mu[1], lambda, f.k_steep, f.g0, g[0], g[1], 10000);
    worst = std::max(worst, grid - got);
  }
  double zero_var = 0.0, zero_err = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index P = gen.integer(2, 20);
    const Vector g = gen.vector(P, 0.05, 1.0);
    const FuzzyParams f{0.5, gen.uniform(0.5, 20.0), gen.uniform(0.05, 2.0)};
    const Vector e = target_exposure(Vector::Zero(P), gen.uniform(0.05, 1.0), f, g, gen.engine());
    zero_var = std::max(zero_var, exposure_unfairness(e, g));
    zero_err = std::max(zero_err, (e - g / g.sum()).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-4 && zero_var < 1e-10,
          fmt("grid oracle shortfall %.2e over 100 draws, mu=0 Var(e/gamma) %.2e, |e-gamma| %.2e", std::max(worst, 0.0),
              zero_var, zero_err)};
}

Outcome tradeoff() {
  const Dataset& ds = reference_dataset();
  auto t0 = Clock::now();
  const SessionLog a = run_session(ds, reference_config(0.0), Policy::bankfair_plus);
  const double ta = seconds_since(t0);
  t0 = Clock::now();
  const SessionLog b = run_session(ds, reference_config(0.9), Policy::bankfair_plus);
  const double tb = seconds_since(t0);
  const auto& m0 = a.metrics;
  const auto& m9 = b.metrics;
  const bool pass = m9.gini < m0.gini && m9.esp > m0.esp && m9.ndcg_mean <= m0.ndcg_mean && ta < 60 && tb < 60;
  return {pass, fmt("lambda=0: Gini %.4f ESP %.3f NDCG %.4f | lambda=0.9: Gini %.4f ESP %.3f NDCG %.4f | "
                    "%.2fs, %.2fs",
                    m0.gini, m0.esp, m0.ndcg_mean, m9.gini, m9.esp, m9.ndcg_mean, ta, tb)};
}

Outcome individual_fairness() {
  const Dataset& ds = reference_dataset();
  const SessionLog low = run_session(ds, reference_config(0.7, 0.1), Policy::bankfair_plus);
  const SessionLog high = run_session(ds, reference_config(0.7, 5.0), Policy::bankfair_plus);
  const SessionLog linear = run_session(ds, reference_config(0.7, 5.0), Policy::bankfair_linear);
  const bool pass = high.metrics.mmr >= low.metrics.mmr && high.metrics.var <= low.metrics.var &&
                    high.metrics.mmr > linear.metrics.mmr;
  return {pass, fmt("MMR delta=0.1 %.4f, delta=5 %.4f, linear %.4f | Var delta=0.1 %.5f, delta=5 %.5f",
                    low.metrics.mmr, high.metrics.mmr, linear.metrics.mmr, low.metrics.var, high.metrics.var)};
}

Outcome metric_invariants() {
  Gen gen(108);
  double oracle = 0.0, scale = 0.0;
  bool iff = true, range = true;
  for (int rep = 0; rep < 1000; ++rep) {
    const Index P = gen.integer(1, 4);
    const Vector e = gen.vector(P, 0.0, 5.0);
    const Vector g = gen.vector(P, 0.05, 1.0);
    const Vector m = gen.vector(P, 0.0, 5.0);
    const auto nd = gen.reals(gen.integer(2, 6), 0.0, 1.0);
    oracle = std::max(oracle, std::abs(gini(e, g) - testing::ref_gini(as_std(e), as_std(g))));
    oracle = std::max(oracle, std::abs(var_accuracy(nd) - testing::ref_var(nd)));
    oracle = std::max(oracle, std::abs(esp(e, m) - testing::ref_esp(as_std(e), as_std(m))));
    const double c = std::exp(gen.uniform(-4.0, 4.0));
    scale = std::max(scale, std::abs(gini(Vector(c * e), g) - gini(e, g)));

    std::vector<double> same(nd.size(), nd.front());
    const auto& pick = gen.coin() ? same : nd;
    iff = iff && ((var_accuracy(pick) == 0.0) == (mmr(pick) == 1.0));

    const Index n = gen.integer(2, 8);
    const auto s = gen.reals(n, 0.0, 1.0);
    const PreferenceStore store = testing::make_store({s});
    std::vector<Index> items(static_cast<std::size_t>(n));
    std::iota(items.begin(), items.end(), 0);
    std::shuffle(items.begin(), items.end(), gen.engine());
    items.resize(static_cast<std::size_t>(gen.integer(1, n)));
    const double v = ndcg(Slate(0, items), store);
    range = range && v >= 0.0 && v <= 1.0;
  }
  return {oracle <= 1e-12 && scale <= 1e-12 && iff && range,
          fmt("oracle gap %.2e, Gini scale drift %.2e, Var=0 iff MMR=1 %s, NDCG in [0,1] %s", oracle, scale,
              iff ? "yes" : "no", range ? "yes" : "no")};
}

Outcome determinism() {
  const Dataset& ds = reference_dataset();
  std::ostringstream a, b;
  write_log(a, run_session(ds, reference_config(0.9), Policy::bankfair_plus), ds);
  write_log(b, run_session(ds, reference_config(0.9), Policy::bankfair_plus), ds);
  return {a.str() == b.str() && !a.str().empty(),
          fmt("%zu and %zu bytes, identical %s", a.str().size(), b.str().size(), a.str() == b.str() ? "yes" : "no")};
}

Outcome performance() {
  SyntheticSpec spec;
  spec.users = 5000;
  spec.items = 1000;
  spec.providers = 50;
  spec.arrivals = 50000;
  spec.seed = 42;
  const SyntheticDataset d = generate_dataset(spec);
  const Dataset ds = Dataset::assemble(d.store, d.catalog, d.schedule);
  RunConfig c;
  c.K = 10;
  const auto start = Clock::now();
  const SessionLog log = run_session(ds, c, Policy::bankfair_plus);
  const double secs = seconds_since(start);
  return {secs < 60.0 && log.decisions.size() == 50000,
          fmt("%zu decisions, |P|=%ld, K=10 in %.2fs", log.decisions.size(),
              static_cast<long>(ds.catalog.provider_count()), secs)};
}

}  // namespace

int main() {
  report(1, "Talmud rule suite", talmud_suite);
  report(2, "regret function suite", regret_suite);
  report(3, "degenerate lambda identity", degenerate_lambda);
  report(4, "inner solver oracle", inner_oracle);
  report(5, "target exposure oracle", target_oracle);
  report(6, "directional trade-off", tradeoff);
  report(7, "individual fairness trend", individual_fairness);
  report(8, "metric invariants", metric_invariants);
  report(9, "determinism", determinism);
  report(10, "performance envelope", performance);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
