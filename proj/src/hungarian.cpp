// src/hungarian.cpp

// Copyright 2026  The voxeval Authors

// See LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "voxeval/hungarian.hpp"

#include <algorithm>
#include <limits>

#include "voxeval/errors.hpp"

namespace voxeval {

namespace {

// Weight with an exact primary part and a tie-breaking secondary part,
// ordered lexicographically. Addition is componentwise.
struct LexWeight {
  std::int64_t primary = 0;
  double secondary = 0.0;

  friend LexWeight operator+(LexWeight a, LexWeight b) {
    return {a.primary + b.primary, a.secondary + b.secondary};
  }
  friend LexWeight operator-(LexWeight a, LexWeight b) {
    return {a.primary - b.primary, a.secondary - b.secondary};
  }
  friend LexWeight operator-(LexWeight a) { return {-a.primary, -a.secondary}; }
  friend bool operator<(LexWeight a, LexWeight b) {
    return a.primary != b.primary ? a.primary < b.primary : a.secondary < b.secondary;
  }
  LexWeight& operator+=(LexWeight o) { return *this = *this + o; }
  LexWeight& operator-=(LexWeight o) { return *this = *this - o; }
};

template <typename W>
W infinite();

template <>
double infinite<double>() {
  return std::numeric_limits<double>::infinity();
}

template <>
LexWeight infinite<LexWeight>() {
  return {std::numeric_limits<std::int64_t>::max() / 4, 0.0};
}

// Kuhn-Munkres with potentials over any ordered abelian group. `weight(i, j)`
// is defined for 0 <= i < rows, 0 <= j < cols. Returns row -> column.
template <typename W, typename WeightFn>
std::vector<std::optional<std::size_t>> solve(std::size_t rows, std::size_t cols, WeightFn weight) {
  const std::size_t n = std::max(rows, cols);
  std::vector<std::optional<std::size_t>> row_to_col(rows, std::nullopt);
  if (n == 0) return row_to_col;

  // Minimise cost = -weight over the padded square matrix. Index 0 is a
  // sentinel column; rows and columns are 1-based below.
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i <= rows && j <= cols) ? -weight(i - 1, j - 1) : W{};
  };
  const W inf = infinite<W>();
  std::vector<W> row_pot(n + 1, W{}), col_pot(n + 1, W{});
  std::vector<std::size_t> col_owner(n + 1, 0), came_from(n + 1, 0);

  for (std::size_t row = 1; row <= n; ++row) {
    col_owner[0] = row;
    std::size_t col = 0;
    std::vector<W> slack(n + 1, inf);
    std::vector<char> visited(n + 1, 0);
    do {
      visited[col] = 1;
      const std::size_t i = col_owner[col];
      W delta = inf;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (visited[j]) continue;
        const W reduced = cost(i, j) - row_pot[i] - col_pot[j];
        if (reduced < slack[j]) {
          slack[j] = reduced;
          came_from[j] = col;
        }
        if (slack[j] < delta) {
          delta = slack[j];
          next = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (visited[j]) {
          row_pot[col_owner[j]] += delta;
          col_pot[j] -= delta;
        } else {
          slack[j] -= delta;
        }
      }
      col = next;
    } while (col_owner[col] != 0);
    // Augment along the alternating path back to the sentinel.
    do {
      const std::size_t prev = came_from[col];
      col_owner[col] = col_owner[prev];
      col = prev;
    } while (col != 0);
  }

  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = col_owner[j];
    if (i >= 1 && i <= rows && j <= cols) row_to_col[i - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment max_weight_assignment(const WeightMatrix& weights) {
  Assignment result;
  result.row_to_col =
      solve<double>(weights.rows, weights.cols, [&](std::size_t i, std::size_t j) { return weights.at(i, j); });
  for (std::size_t i = 0; i < weights.rows; ++i) {
    if (result.row_to_col[i]) result.total += weights.at(i, *result.row_to_col[i]);
  }
  return result;
}

Assignment max_weight_assignment(const IntWeightMatrix& primary, const WeightMatrix& secondary) {
  if (primary.rows != secondary.rows || primary.cols != secondary.cols) {
    throw ArgumentError("primary and secondary weight matrices differ in shape");
  }
  Assignment result;
  result.row_to_col = solve<LexWeight>(primary.rows, primary.cols, [&](std::size_t i, std::size_t j) {
    return LexWeight{primary.at(i, j), secondary.at(i, j)};
  });
  for (std::size_t i = 0; i < primary.rows; ++i) {
    if (result.row_to_col[i]) result.total += static_cast<double>(primary.at(i, *result.row_to_col[i]));
  }
  return result;
}

}  // namespace voxeval
