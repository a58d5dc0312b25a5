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

#include "dpnash/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnash/lp.h"

namespace dpnash {
namespace {

constexpr double kRangeTol = 1e-9;

absl::Status ValidatePayoffs(const PayoffPair& pp) {
  const Matrix& up = pp.q_upper;
  const Matrix& lo = pp.q_lower;
  if (up.rows < 1 || up.cols < 1 || up.rows != lo.rows || up.cols != lo.cols ||
      up.data.size() != static_cast<size_t>(up.rows) * up.cols ||
      lo.data.size() != up.data.size()) {
    return absl::InvalidArgumentError("payoff matrices have mismatched shapes");
  }
  for (int a = 0; a < up.rows; ++a) {
    for (int b = 0; b < up.cols; ++b) {
      const double u = up(a, b), l = lo(a, b);
      if (!(u >= -kRangeTol && u <= pp.H + kRangeTol) ||
          !(l >= -kRangeTol && l <= pp.H + kRangeTol)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "payoff at (", a, ",", b, ") outside [0, ", pp.H, "]: upper ", u,
            ", lower ", l));
      }
      if (u < l - kRangeTol) {
        return absl::InvalidArgumentError(absl::StrCat(
            "q_upper < q_lower at (", a, ",", b, "): ", u, " < ", l));
      }
    }
  }
  return absl::OkStatus();
}

// Clamps roundoff negatives and renormalizes.
void CleanDistribution(std::vector<double>& p) {
  double sum = 0.0;
  for (double& x : p) {
    x = std::max(0.0, x);
    sum += x;
  }
  for (double& x : p) x /= sum;
}

LinearProgram MixLp(const Matrix& m, LpSide side) {
  // Row: vars (p_0..p_{A-1}, v), minimize -v, v - sum_a p_a M(a,b) <= 0.
  // Column: vars (q_0..q_{B-1}, w), minimize w, sum_b q_b M(a,b) - w <= 0.
  const int k = side == LpSide::kRow ? m.rows : m.cols;
  const int others = side == LpSide::kRow ? m.cols : m.rows;
  LinearProgram lp;
  lp.objective.assign(k + 1, 0.0);
  lp.objective[k] = side == LpSide::kRow ? -1.0 : 1.0;
  lp.lower_bounds.assign(k + 1, 0.0);
  lp.lower_bounds[k] = -std::numeric_limits<double>::infinity();
  for (int o = 0; o < others; ++o) {
    LpRow row;
    row.coeffs.assign(k + 1, 0.0);
    for (int i = 0; i < k; ++i) {
      const double entry = side == LpSide::kRow ? m(i, o) : m(o, i);
      row.coeffs[i] = side == LpSide::kRow ? -entry : entry;
    }
    row.coeffs[k] = side == LpSide::kRow ? 1.0 : -1.0;
    lp.ineq.push_back(std::move(row));
  }
  LpRow simplex;
  simplex.coeffs.assign(k + 1, 1.0);
  simplex.coeffs[k] = 0.0;
  simplex.rhs = 1.0;
  lp.eq.push_back(std::move(simplex));
  return lp;
}

absl::Status CheckMatrix(const Matrix& m) {
  if (m.rows < 1 || m.cols < 1 ||
      m.data.size() != static_cast<size_t>(m.rows) * m.cols) {
    return absl::InvalidArgumentError("matrix shape mismatch");
  }
  for (double v : m.data) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("matrix has non-finite entries");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::pair<double, std::vector<double>>> SolveMix(
    const Matrix& m, LpSide side) {
  auto sol = Solve(MixLp(m, side));
  if (!sol.ok()) return sol.status();
  if (sol->status != LpStatus::kOptimal) {
    return absl::InternalError("matrix game LP not optimal");
  }
  const int k = side == LpSide::kRow ? m.rows : m.cols;
  std::vector<double> mix(sol->x.begin(), sol->x.begin() + k);
  CleanDistribution(mix);
  return std::pair{sol->x[k], std::move(mix)};
}

}  // namespace

absl::StatusOr<std::vector<double>> ComputeCce(const PayoffPair& pp) {
  if (auto st = ValidatePayoffs(pp); !st.ok()) return st;
  const int A = pp.q_upper.rows;
  const int B = pp.q_upper.cols;
  const int n = A * B;
  LinearProgram lp;
  lp.objective.assign(n, 0.0);
  lp.ineq.reserve(A + B);
  // Max-player deviations: sum pi(a,b) [Qu(a',b) - Qu(a,b)] <= 0.
  for (int dev = 0; dev < A; ++dev) {
    LpRow row;
    row.coeffs.resize(n);
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < B; ++b) {
        row.coeffs[a * B + b] = pp.q_upper(dev, b) - pp.q_upper(a, b);
      }
    }
    lp.ineq.push_back(std::move(row));
  }
  // Min-player deviations: sum pi(a,b) [Ql(a,b) - Ql(a,b')] <= 0.
  for (int dev = 0; dev < B; ++dev) {
    LpRow row;
    row.coeffs.resize(n);
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < B; ++b) {
        row.coeffs[a * B + b] = pp.q_lower(a, b) - pp.q_lower(a, dev);
      }
    }
    lp.ineq.push_back(std::move(row));
  }
  lp.eq.push_back({std::vector<double>(n, 1.0), 1.0});
  auto sol = FeasiblePoint(lp);
  if (!sol.ok()) return sol.status();
  if (sol->status != LpStatus::kOptimal) {
    return absl::InternalError("CCE feasibility LP reported infeasible");
  }
  CleanDistribution(sol->x);
  return std::move(sol->x);
}

double CceMaxViolation(const PayoffPair& pp, std::span<const double> pi) {
  const int A = pp.q_upper.rows;
  const int B = pp.q_upper.cols;
  double eu = 0.0, el = 0.0, sum = 0.0, worst = 0.0;
  for (int a = 0; a < A; ++a) {
    for (int b = 0; b < B; ++b) {
      const double p = pi[a * B + b];
      worst = std::max(worst, -p);
      sum += p;
      eu += p * pp.q_upper(a, b);
      el += p * pp.q_lower(a, b);
    }
  }
  worst = std::max(worst, std::fabs(sum - 1.0));
  for (int dev = 0; dev < A; ++dev) {
    double v = 0.0;
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < B; ++b) v += pi[a * B + b] * pp.q_upper(dev, b);
    }
    worst = std::max(worst, v - eu);
  }
  for (int dev = 0; dev < B; ++dev) {
    double v = 0.0;
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < B; ++b) v += pi[a * B + b] * pp.q_lower(a, dev);
    }
    worst = std::max(worst, el - v);
  }
  return worst;
}

absl::StatusOr<MatrixGameSolution> MatrixGameSolve(const Matrix& m) {
  if (auto st = CheckMatrix(m); !st.ok()) return st;
  auto row = SolveMix(m, LpSide::kRow);
  if (!row.ok()) return row.status();
  auto col = SolveMix(m, LpSide::kColumn);
  if (!col.ok()) return col.status();
  return MatrixGameSolution{.value = row->first,
                            .col_value = col->first,
                            .row_mix = std::move(row->second),
                            .col_mix = std::move(col->second)};
}

absl::StatusOr<double> MatrixGameValue(const Matrix& m, LpSide side) {
  if (auto st = CheckMatrix(m); !st.ok()) return st;
  auto r = SolveMix(m, side);
  if (!r.ok()) return r.status();
  return r->first;
}

}  // namespace dpnash
