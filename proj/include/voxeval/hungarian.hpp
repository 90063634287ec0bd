// include/voxeval/hungarian.hpp

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace voxeval {

// Row-major dense matrix of non-negative weights.
struct WeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cells;

  WeightMatrix() = default;
  WeightMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

struct IntWeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> cells;

  IntWeightMatrix() = default;
  IntWeightMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, 0) {}
  std::int64_t& at(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
  std::int64_t at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

struct Assignment {
  // row_to_col[i] is the column assigned to row i, if any.
  std::vector<std::optional<std::size_t>> row_to_col;
  // Sum of assigned weights, accumulated in row order.
  double total = 0.0;
};

// Maximum-weight one-to-one assignment (Kuhn-Munkres with potentials,
// O(n^3) for n = max(rows, cols)). Rectangular inputs are padded with zero
// cells; every row is assigned when rows <= cols.
Assignment max_weight_assignment(const WeightMatrix& weights);

// Lexicographic variant: maximises the primary total exactly, then the
// secondary total among assignments that attain it. `total` is the primary
// total.
Assignment max_weight_assignment(const IntWeightMatrix& primary, const WeightMatrix& secondary);

}  // namespace voxeval
