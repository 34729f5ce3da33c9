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

// Interval-level minimum-exposure planning as a sequential bankruptcy problem.
//
// At the start of interval n each provider's estate is the exposure it is
// still owed. Its claims are the demands of the remaining intervals n..N,
// proportional to forecast traffic. The Talmud rule splits the estate over
// those claims and the first entry becomes the provider's target M_{p,n}.

#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "bankfair/core.hpp"

namespace bankfair {

enum class ForecastMethod { mean, seasonal, last };
enum class DemandWeighting { uniform, merit };

struct ForecastOptions {
  ForecastMethod method = ForecastMethod::mean;
  double prior = 0.0;      // used when history is empty
  Index period = 2;        // seasonal phase length
};

/// Observed traffic r_1..r_{n-1}.
struct TrafficStats {
  std::vector<double> history;
  void close_interval(double traffic) { history.push_back(traffic); }
};

/// r_hat for intervals (history.size() + 1) .. (history.size() + upcoming).
Vector forecast_traffic(const TrafficStats& stats, const ForecastOptions& options, Index upcoming);

/// D_{p,i} = alpha K r_hat(i), scaled by gamma_p / sum(gamma) in merit mode.
/// Rows are providers, columns the upcoming intervals.
Matrix build_demand(const Vector& forecast, Index K, double alpha, const Vector& merit,
                    DemandWeighting weighting);

/// [previous - earned]_+ elementwise.
template <typename DerivedA, typename DerivedB>
auto update_estate(const Eigen::MatrixBase<DerivedA>& previous,
                   const Eigen::MatrixBase<DerivedB>& earned) {
  using Scalar = typename DerivedA::Scalar;
  return VectorX<Scalar>((previous - earned).cwiseMax(Scalar(0)));
}

inline double update_estate(double previous, double earned) {
  return std::max(0.0, previous - earned);
}

template <typename Scalar>
struct TalmudSplit {
  VectorX<Scalar> allocation;
  Scalar theta = Scalar(0);
  Scalar surplus = Scalar(0);  // estate beyond the claims total, discarded
};

/// Talmud division of `estate` over `claims`.
///
/// Below half the claims total every claimant gets min(D_i/2, theta); above
/// it, max(D_i/2, D_i - theta). theta is found by bisection so the awards sum
/// to the estate. An estate larger than the claims total pays every claim in
/// full and reports the excess as surplus.
template <typename Derived>
TalmudSplit<typename Derived::Scalar> talmud_split(typename Derived::Scalar estate,
                                                   const Eigen::MatrixBase<Derived>& claims) {
  using Scalar = typename Derived::Scalar;
  constexpr int kMaxIterations = 200;
  const Scalar kTolerance = Scalar(1e-9);

  if (!(estate >= Scalar(0))) throw std::domain_error("talmud: estate must be non-negative");
  if (claims.size() > 0 && !((claims.array() >= Scalar(0)).all())) {
    throw std::domain_error("talmud: claims must be non-negative");
  }

  TalmudSplit<Scalar> out;
  const Index n = claims.size();
  if (n == 0) {
    out.allocation.resize(0);
    out.surplus = estate;
    return out;
  }
  const Scalar total = claims.sum();
  if (estate == Scalar(0)) {
    out.allocation = VectorX<Scalar>::Zero(n);
    return out;
  }
  if (estate >= total) {
    out.allocation = claims;
    out.surplus = estate - total;
    out.theta = Scalar(0);
    return out;
  }
  const VectorX<Scalar> half = claims / Scalar(2);
  const bool lower = estate <= total / Scalar(2);

  auto awards = [&](Scalar theta) -> VectorX<Scalar> {
    if (lower) return half.cwiseMin(theta);
    return half.cwiseMax((claims.array() - theta).matrix());
  };

  // Bisection runs until theta is pinned to machine precision or the
  // residual falls well under the balance tolerance.
  const Scalar stop = kTolerance * Scalar(1e-3);
  Scalar lo = 0;
  Scalar hi = claims.maxCoeff();
  Scalar theta = (lo + hi) / Scalar(2);
  for (int it = 0; it < kMaxIterations; ++it) {
    theta = (lo + hi) / Scalar(2);
    const Scalar residual = awards(theta).sum() - estate;
    if (std::abs(residual) <= stop) break;
    // Lower branch: awards grow with theta. Upper branch: they shrink.
    if ((residual < Scalar(0)) == lower) {
      lo = theta;
    } else {
      hi = theta;
    }
    if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), hi)) break;
  }
  out.theta = theta;
  out.allocation = awards(theta);
  return out;
}

template <typename Derived>
VectorX<typename Derived::Scalar> talmud_allocate(typename Derived::Scalar estate,
                                                  const Eigen::MatrixBase<Derived>& claims) {
  return talmud_split(estate, claims).allocation;
}

/// Module output for one interval.
struct AllocationPlan {
  Index interval = 0;    // n, 1-based
  Vector estate;         // m_hat_p(n)
  Matrix demand;         // D_{p,i}(n), i = n..N
  Matrix allocation;     // M_hat_{p,i}(n)
  Vector current_target; // M_{p,n}
  Vector theta;
  Vector surplus;
};

/// Runs the Talmud split per provider over the remaining intervals.
AllocationPlan plan_interval(Index n, const Vector& estate, const Matrix& demand);

/// Required minimum exposure per provider over the whole horizon.
struct FairnessSpec {
  Vector min_total;  // m_p
  double beta_min = 0.9;
  Index horizon = 0;

  /// m_p = beta * gamma_p / sum(gamma) * total_budget.
  static FairnessSpec from_merit(const Vector& merit, double beta, double total_budget,
                                 Index horizon);
};

struct AllocatorOptions {
  Index K = 10;
  double alpha_demand = 1.0;
  DemandWeighting weighting = DemandWeighting::merit;
  ForecastOptions forecast;
};

/// Stateful coordinator over the horizon: plan, observe, repeat.
class BankruptcyAllocator {
 public:
  BankruptcyAllocator(FairnessSpec fairness, Vector merit, AllocatorOptions options);

  /// Plan for the next interval. Must alternate with close_interval.
  const AllocationPlan& begin_interval();
  /// Records traffic r_n and earned exposure E_{., n}.
  void close_interval(Index traffic, const Vector& earned);

  Index next_interval() const { return next_; }
  const Vector& estate() const { return estate_; }
  const TrafficStats& traffic() const { return traffic_; }
  const std::vector<AllocationPlan>& plans() const { return plans_; }
  const FairnessSpec& fairness() const { return fairness_; }

 private:
  FairnessSpec fairness_;
  Vector merit_;
  AllocatorOptions options_;
  TrafficStats traffic_;
  Vector estate_;
  Index next_ = 1;
  bool open_ = false;
  std::vector<AllocationPlan> plans_;
};

}  // namespace bankfair
