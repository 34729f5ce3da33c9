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

#include <vector>

#include "bankfair/metrics.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bankfair;
using bankfair::testing::Gen;

namespace {

Vector as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("dcg examples") {
    const PreferenceStore store = testing::make_store({{1.0, 0.5}});
    const double w2 = testing::ref_weight(2);
    CHECK(dcg(Slate(0, {0, 1}), store) == doctest::Approx(1.0 + 0.5 * w2).epsilon(1e-14));
    CHECK(dcg(Slate(0, {0, 1}), store) == doctest::Approx(1.31546).epsilon(1e-5));
    CHECK(dcg(Slate(0, {1, 0}), store) == doctest::Approx(1.13093).epsilon(1e-5));
    CHECK(ideal_dcg(0, store, 2) == doctest::Approx(1.31546).epsilon(1e-5));
    CHECK(ndcg(Slate(0, {1, 0}), store) == doctest::Approx((0.5 + w2) / (1.0 + 0.5 * w2)));
    CHECK(ndcg(Slate(0, {1, 0}), store) == doctest::Approx(0.85973).epsilon(1e-5));
    CHECK(ndcg(Slate(0, {0, 1}), store) == 1.0);
    CHECK_THROWS(ideal_dcg(0, store, 3));
  }

  TEST_CASE("degenerate users") {
    const PreferenceStore store = testing::make_store({{0.0, 0.0, 0.0}, {0.7, 0.7, 0.7}});
    CHECK(dcg(Slate(0, {2, 1}), store) == 0.0);
    CHECK(ndcg(Slate(0, {2, 1}), store) == 1.0);
    CHECK(ideal_dcg(1, store, 3) == doctest::Approx(0.7 * position_weights(3).sum()));
    const PreferenceStore top = testing::make_store({{0.1, 0.7, 0.3}});
    CHECK(ideal_dcg(0, top, 1) == doctest::Approx(0.7));
  }

  TEST_CASE("ideal items break ties by index") {
    Vector s(4);
    s << 0.5, 0.9, 0.5, 0.9;
    CHECK(ideal_items(s, 3) == std::vector<Index>{1, 3, 0});
  }

  TEST_CASE("exposure ledger") {
    const ProviderCatalog catalog = testing::make_catalog({0, 0, 1});
    ExposureLedger ledger(2, 2);
    CHECK(ledger.raw().isZero());
    CHECK(ledger.normalized().isZero());
    record_exposure(ledger, Slate(0, {0, 1}), catalog, 1);
    CHECK(ledger.raw()[catalog.owner(0)] == doctest::Approx(1.63093).epsilon(1e-5));
    const Vector once = ledger.raw();
    record_exposure(ledger, Slate(0, {0, 1}), catalog, 2);
    CHECK((ledger.raw() - 2.0 * once).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(ledger.interval(2)[catalog.owner(0)] == doctest::Approx(1.63093).epsilon(1e-5));
    CHECK_THROWS(record_exposure(ledger, Slate(0, {0, 5}), catalog, 1));
  }

  TEST_CASE("ledger additivity and normalization") {
    Gen gen(3);
    for (int rep = 0; rep < 200; ++rep) {
      const Index P = gen.integer(1, 4);
      const Index n = gen.integer(P + 2, 10);
      const ProviderCatalog catalog = testing::make_catalog(gen.owners(n, P));
      const Index N = gen.integer(1, 3);
      ExposureLedger whole(catalog.provider_count(), N);
      ExposureLedger a(catalog.provider_count(), N);
      ExposureLedger b(catalog.provider_count(), N);
      const Index slates = gen.integer(1, 6);
      for (Index s = 0; s < slates; ++s) {
        std::vector<Index> items(static_cast<std::size_t>(n));
        std::iota(items.begin(), items.end(), 0);
        std::shuffle(items.begin(), items.end(), gen.engine());
        items.resize(static_cast<std::size_t>(gen.integer(1, 3)));
        const Slate slate(0, items);
        const Index interval = gen.integer(1, N);
        record_exposure(whole, slate, catalog, interval);
        record_exposure(s % 2 == 0 ? a : b, slate, catalog, interval);
      }
      a += b;
      CHECK((whole.raw() - a.raw()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((whole.raw() - whole.per_interval().rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(whole.normalized().sum() - 1.0) < 1e-9);
      CHECK((whole.normalized().array() >= 0.0).all());
    }
  }

  TEST_CASE("esp") {
    Vector e(4), m(4);
    e << 1, 2, 3, 4;
    m << 0, 0, 0, 0;
    CHECK(esp(e, m) == 1.0);
    m.setConstant(10);
    CHECK(esp(e, m) == 0.0);
    m << 1, 2, 3, 5;
    CHECK(esp(e, m) == 0.75);
  }

  TEST_CASE("gini examples") {
    Vector e(2), g(2);
    e << 0, 1;
    g << 1, 1;
    CHECK(gini(e, g) == doctest::Approx(0.5).epsilon(1e-15));
    Vector e3(3), g3(3);
    e3 << 1, 1, 0;
    g3 << 1, 1, 1;
    CHECK(gini(e3, g3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    e3 << 0.2, 0.4, 0.6;
    g3 << 1, 2, 3;
    CHECK(gini(e3, g3) == doctest::Approx(0.0));
    CHECK_THROWS(gini(Vector(Vector::Zero(3)), g3));
    g3 << 1, 0, 1;
    CHECK_THROWS(gini(e3, g3));
  }

  TEST_CASE("mmr and var examples") {
    CHECK(mmr(std::vector<double>{0.4, 0.4, 0.4}) == 1.0);
    CHECK(mmr(std::vector<double>{0.25, 0.5}) == 0.5);
    CHECK(mmr(std::vector<double>{0.0, 0.9}) == 0.0);
    CHECK_THROWS(mmr(std::vector<double>{}));
    CHECK(var_accuracy(std::vector<double>{0.3, 0.3}) == 0.0);
    CHECK(var_accuracy(std::vector<double>{0.0, 1.0}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(var_accuracy(std::vector<double>{0.0, 0.0, 1.0}) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    CHECK_THROWS(var_accuracy(std::vector<double>{0.5}));
  }

  TEST_CASE("quality report accumulates repeat visits") {
    QualityReport r;
    r.add(3, 0.5, 1.0);
    r.add(1, 0.0, 0.0);
    r.add(3, 1.0, 1.0);
    REQUIRE(r.size() == 2);
    CHECK(r.entries()[0].ndcg() == doctest::Approx(0.75));
    CHECK(r.entries()[1].ndcg() == 1.0);
  }

  TEST_CASE("metrics agree with brute force") {
    Gen gen(2026);
    for (int rep = 0; rep < 1000; ++rep) {
      const Index P = gen.integer(1, 4);
      const auto e = gen.reals(P, 0.0, 5.0);
      const auto gamma = gen.reals(P, 0.05, 1.0);
      const auto m = gen.reals(P, 0.0, 5.0);
      const auto nd = gen.reals(gen.integer(2, 6), 0.0, 1.0);
      CHECK(std::abs(gini(as_vector(e), as_vector(gamma)) - testing::ref_gini(e, gamma)) <= 1e-12);
      CHECK(esp(as_vector(e), as_vector(m)) == testing::ref_esp(e, m));
      CHECK(std::abs(var_accuracy(nd) - testing::ref_var(nd)) <= 1e-12);
    }
  }

  TEST_CASE("gini is scale invariant") {
    Gen gen(5);
    for (int rep = 0; rep < 500; ++rep) {
      const Index P = gen.integer(2, 20);
      const Vector e = gen.vector(P, 0.0, 3.0);
      const Vector g = gen.vector(P, 0.1, 1.0);
      const double c = std::exp(gen.uniform(-5.0, 5.0));
      CHECK(std::abs(gini(Vector(c * e), g) - gini(e, g)) <= 1e-12);
      const double value = gini(e, g);
      CHECK(value >= 0.0);
      CHECK(value <= 1.0);
    }
  }

  TEST_CASE("var is zero exactly when mmr is one") {
    Gen gen(8);
    for (int rep = 0; rep < 500; ++rep) {
      const Index n = gen.integer(2, 8);
      std::vector<double> nd = gen.reals(n, 0.05, 1.0);
      if (gen.coin()) std::fill(nd.begin(), nd.end(), nd.front());
      CHECK((var_accuracy(nd) == 0.0) == (mmr(nd) == 1.0));
    }
  }

  TEST_CASE("ndcg stays in the unit interval") {
    Gen gen(13);
    for (int rep = 0; rep < 500; ++rep) {
      const Index n = gen.integer(2, 9);
      const Index K = gen.integer(1, n);
      const auto s = gen.reals(n, 0.0, 1.0);
      const PreferenceStore store = testing::make_store({s});
      std::vector<Index> items(static_cast<std::size_t>(n));
      std::iota(items.begin(), items.end(), 0);
      std::shuffle(items.begin(), items.end(), gen.engine());
      items.resize(static_cast<std::size_t>(K));
      const double v = ndcg(Slate(0, items), store);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-15);
      CHECK(std::abs(ideal_dcg(0, store, K) - testing::ref_ideal_dcg(s, K)) < 1e-12);
      const std::vector<Index> ideal = ideal_items(store.user_scores(0), K);
      CHECK(ndcg(Slate(0, ideal), store) == 1.0);
    }
  }
}
