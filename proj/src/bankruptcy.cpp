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

#include "bankfair/bankruptcy.hpp"

#include <numeric>

namespace bankfair {

namespace {
double mean_of(const std::vector<double>& values) {
  const Eigen::Map<const Vector> v(values.data(), static_cast<Index>(values.size()));
  return pairwise_sum(v) / static_cast<double>(values.size());
}
}  // namespace

Vector forecast_traffic(const TrafficStats& stats, const ForecastOptions& options, Index upcoming) {
  if (upcoming < 0) throw std::invalid_argument("forecast_traffic: negative horizon");
  const auto& history = stats.history;
  Vector forecast(upcoming);
  if (history.empty()) {
    forecast.setConstant(std::max(0.0, options.prior));
    return forecast;
  }
  switch (options.method) {
    case ForecastMethod::mean:
      forecast.setConstant(mean_of(history));
      break;
    case ForecastMethod::last:
      forecast.setConstant(history.back());
      break;
    case ForecastMethod::seasonal: {
      const Index period = std::max<Index>(1, options.period);
      const double overall = mean_of(history);
      const Index first = static_cast<Index>(history.size());  // 0-based index of next interval
      for (Index j = 0; j < upcoming; ++j) {
        const Index phase = (first + j) % period;
        double sum = 0.0;
        Index count = 0;
        for (Index s = phase; s < static_cast<Index>(history.size()); s += period) {
          sum += history[static_cast<std::size_t>(s)];
          ++count;
        }
        forecast[j] = count > 0 ? sum / static_cast<double>(count) : overall;
      }
      break;
    }
  }
  return forecast.cwiseMax(0.0);
}

Matrix build_demand(const Vector& forecast, Index K, double alpha, const Vector& merit,
                    DemandWeighting weighting) {
  if (!(alpha > 0.0)) throw std::invalid_argument("build_demand: alpha must be positive");
  const Index P = merit.size();
  const Eigen::RowVectorXd per_interval = alpha * static_cast<double>(K) * forecast.transpose();
  Matrix demand(P, forecast.size());
  if (weighting == DemandWeighting::uniform) {
    demand = per_interval.replicate(P, 1);
  } else {
    const double total = merit.sum();
    if (!(total > 0.0)) throw std::invalid_argument("build_demand: merit sums to zero");
    demand = (merit / total) * per_interval;
  }
  return demand;
}

AllocationPlan plan_interval(Index n, const Vector& estate, const Matrix& demand) {
  if (estate.size() != demand.rows()) {
    throw std::invalid_argument("plan_interval: one estate per provider required");
  }
  if (demand.cols() < 1) throw std::invalid_argument("plan_interval: no intervals left");
  const Index P = estate.size();
  AllocationPlan plan;
  plan.interval = n;
  plan.estate = estate;
  plan.demand = demand;
  plan.allocation.resize(P, demand.cols());
  plan.theta.resize(P);
  plan.surplus.resize(P);
  for (Index p = 0; p < P; ++p) {
    auto split = talmud_split(estate[p], demand.row(p).transpose());
    plan.allocation.row(p) = split.allocation.transpose();
    plan.theta[p] = split.theta;
    plan.surplus[p] = split.surplus;
  }
  plan.current_target = plan.allocation.col(0);
  return plan;
}

FairnessSpec FairnessSpec::from_merit(const Vector& merit, double beta, double total_budget,
                                      Index horizon) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta_min must lie in [0, 1]");
  const double total = merit.sum();
  if (!(total > 0.0)) throw std::invalid_argument("merit sums to zero");
  FairnessSpec spec;
  spec.min_total = beta * total_budget * merit / total;
  spec.beta_min = beta;
  spec.horizon = horizon;
  return spec;
}

BankruptcyAllocator::BankruptcyAllocator(FairnessSpec fairness, Vector merit,
                                         AllocatorOptions options)
    : fairness_(std::move(fairness)),
      merit_(std::move(merit)),
      options_(options),
      estate_(fairness_.min_total) {
  if (merit_.size() != fairness_.min_total.size()) {
    throw std::invalid_argument("allocator: merit and minimum exposure sizes differ");
  }
  if (fairness_.horizon < 1) throw std::invalid_argument("allocator: horizon must be >= 1");
}

const AllocationPlan& BankruptcyAllocator::begin_interval() {
  if (open_) throw std::logic_error("allocator: interval already open");
  if (next_ > fairness_.horizon) throw std::logic_error("allocator: horizon exhausted");
  const Index upcoming = fairness_.horizon - next_ + 1;
  const Vector forecast = forecast_traffic(traffic_, options_.forecast, upcoming);
  const Matrix demand =
      build_demand(forecast, options_.K, options_.alpha_demand, merit_, options_.weighting);
  plans_.push_back(plan_interval(next_, estate_, demand));
  open_ = true;
  return plans_.back();
}

void BankruptcyAllocator::close_interval(Index traffic, const Vector& earned) {
  if (!open_) throw std::logic_error("allocator: no open interval");
  traffic_.close_interval(static_cast<double>(traffic));
  estate_ = update_estate(estate_, earned);
  open_ = false;
  ++next_;
}

}  // namespace bankfair
