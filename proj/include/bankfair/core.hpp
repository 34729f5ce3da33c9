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

// Shared numeric aliases, error types and the position-decay model used by
// every other component.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bankfair {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// Users in rows, items in columns. Row-major so a user's score row is
// contiguous for the per-decision solver.
using ScoreMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Malformed input; carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a domain constraint.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Examination probability of rank `k` (1-based): 1 / log2(k + 1).
template <typename Scalar = double>
Scalar position_weight(Index k) {
  if (k < 1) {
    throw std::domain_error("position_weight: rank must be >= 1, got " +
                            std::to_string(k));
  }
  return Scalar(1) / std::log2(Scalar(k + 1));
}

/// The examination vector p = (p(1), ..., p(K)).
template <typename Scalar = double>
VectorX<Scalar> position_weights(Index K) {
  VectorX<Scalar> p(K);
  for (Index k = 0; k < K; ++k) p[k] = position_weight<Scalar>(k + 1);
  return p;
}

namespace detail {
template <typename Derived>
typename Derived::Scalar pairwise_sum_range(const Eigen::DenseBase<Derived>& v,
                                            Index begin, Index end) {
  using Scalar = typename Derived::Scalar;
  constexpr Index kLeaf = 16;
  if (end - begin <= kLeaf) {
    Scalar s(0);
    for (Index i = begin; i < end; ++i) s += v.coeff(i);
    return s;
  }
  const Index mid = begin + (end - begin) / 2;
  return pairwise_sum_range(v, begin, mid) + pairwise_sum_range(v, mid, end);
}
}  // namespace detail

/// Tree summation over a vector expression; error grows as O(log n).
template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& v) {
  return detail::pairwise_sum_range(v, 0, v.size());
}

}  // namespace bankfair
