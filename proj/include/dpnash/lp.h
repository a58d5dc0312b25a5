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

#ifndef DPNASH_LP_H_
#define DPNASH_LP_H_

#include <vector>

#include "absl/status/statusor.h"

namespace dpnash {

// Fixed solver tolerances.
inline constexpr double kLpPivotTol = 1e-10;
inline constexpr double kLpFeasTol = 1e-9;

struct LpRow {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

// minimize objective . x
// s.t.     ineq[i].coeffs . x <= ineq[i].rhs
//          eq[i].coeffs . x   == eq[i].rhs
//          x >= lower_bounds  (empty means all zero; entries may be -inf)
struct LinearProgram {
  std::vector<double> objective;
  std::vector<LpRow> ineq;
  std::vector<LpRow> eq;
  std::vector<double> lower_bounds;

  int num_vars() const { return static_cast<int>(objective.size()); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;  // set iff optimal
  double objective_value = 0.0;
};

// Dense two-phase simplex with Bland's rule. Errors are reserved for malformed
// programs (ragged rows, non-finite coefficients); infeasibility and
// unboundedness are reported through LpSolution::status.
absl::StatusOr<LpSolution> Solve(const LinearProgram& lp);

// Phase 1 only: returns the first basic feasible point Bland's rule reaches.
// The objective is ignored.
absl::StatusOr<LpSolution> FeasiblePoint(const LinearProgram& lp);

// Largest constraint or bound violation of x (0 when feasible).
double MaxViolation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace dpnash

#endif  // DPNASH_LP_H_
