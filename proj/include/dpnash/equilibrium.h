// Copyright 2026 The dpnash Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPNASH_EQUILIBRIUM_H_
#define DPNASH_EQUILIBRIUM_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace dpnash {

// Dense row-major matrix; rows index the max-player's actions.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}
  Matrix(int r, int c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {}

  double operator()(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
  double& operator()(int r, int c) {
    return data[static_cast<size_t>(r) * cols + c];
  }
};

// Optimistic and pessimistic stage payoffs, both in [0, H].
struct PayoffPair {
  Matrix q_upper;
  Matrix q_lower;
  double H = 1.0;
};

// Returns a distribution pi over A x B (row-major) with
//   E_pi q_upper(a, b) >= E_pi q_upper(a', b)  for every a',
//   E_pi q_lower(a, b) <= E_pi q_lower(a, b')  for every b'.
// The point is the first basic feasible solution of the phase-1 LP, so the
// choice is deterministic. Inputs outside [0, H] (beyond 1e-9) or with
// q_upper < q_lower are rejected; an infeasible LP is an internal error.
absl::StatusOr<std::vector<double>> ComputeCce(const PayoffPair& pp);

// Largest violation of the two deviation families (0 for an exact CCE).
double CceMaxViolation(const PayoffPair& pp, std::span<const double> pi);

enum class LpSide { kRow, kColumn };

struct MatrixGameSolution {
  double value = 0.0;      // from the row player's LP
  double col_value = 0.0;  // from the column player's LP
  std::vector<double> row_mix;
  std::vector<double> col_mix;
};

// Zero-sum matrix game, row player maximizing p^T M q. Solves both the
// row player's and the column player's LP.
absl::StatusOr<MatrixGameSolution> MatrixGameSolve(const Matrix& m);

// max_p min_q p^T M q via the row LP, or min_q max_p via the column LP.
absl::StatusOr<double> MatrixGameValue(const Matrix& m, LpSide side);

}  // namespace dpnash

#endif  // DPNASH_EQUILIBRIUM_H_
