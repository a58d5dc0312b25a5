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

#include "dpnash/lp.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpnash {
namespace {

constexpr int kMaxIterations = 100000;

// Standard-form tableau over columns [structural | slack | artificial] with
// the right-hand side stored in the last column of each row.
class Tableau {
 public:
  Tableau(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * (cols + 1)),
        obj_(cols + 1, 0.0), basis_(rows, -1) {}

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * (cols_ + 1) + c]; }
  double at(int r, int c) const {
    return data_[static_cast<size_t>(r) * (cols_ + 1) + c];
  }
  double& rhs(int r) { return at(r, cols_); }
  double rhs(int r) const { return at(r, cols_); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }
  std::vector<double>& obj() { return obj_; }

  // Reduced costs for cost vector `c`: obj = c - c_B^T T.
  void PriceOut(const std::vector<double>& c) {
    std::fill(obj_.begin(), obj_.end(), 0.0);
    for (int j = 0; j < cols_; ++j) obj_[j] = c[j];
    for (int r = 0; r < rows_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) obj_[j] -= cb * at(r, j);
    }
  }

  void Pivot(int pr, int pc) {
    const double inv = 1.0 / at(pr, pc);
    for (int j = 0; j <= cols_; ++j) at(pr, j) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(r, j) -= f * at(pr, j);
      at(r, pc) = 0.0;
    }
    const double f = obj_[pc];
    if (f != 0.0) {
      for (int j = 0; j <= cols_; ++j) obj_[j] -= f * at(pr, j);
      obj_[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  void DropRow(int r) {
    data_.erase(data_.begin() + static_cast<ptrdiff_t>(r) * (cols_ + 1),
                data_.begin() + static_cast<ptrdiff_t>(r + 1) * (cols_ + 1));
    basis_.erase(basis_.begin() + r);
    --rows_;
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
  std::vector<double> obj_;
  std::vector<int> basis_;
};

enum class Outcome { kOptimal, kUnbounded, kStalled };

// Bland's rule: lowest-index improving column enters; among minimum-ratio rows
// the one whose basic variable has the lowest index leaves.
Outcome RunSimplex(Tableau& t, int allowed_cols) {
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    int enter = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      if (t.obj()[j] < -kLpPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return Outcome::kOptimal;
    int leave = -1;
    double best = 0.0;
    for (int r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kLpPivotTol) continue;
      const double ratio = t.rhs(r) / a;
      if (leave < 0 || ratio < best - 1e-12 * (1.0 + std::fabs(best))) {
        leave = r;
        best = ratio;
      } else if (ratio <= best + 1e-12 * (1.0 + std::fabs(best)) &&
                 t.basis()[r] < t.basis()[leave]) {
        leave = r;
        best = std::min(best, ratio);
      }
    }
    if (leave < 0) return Outcome::kUnbounded;
    t.Pivot(leave, enter);
  }
  return Outcome::kStalled;
}

absl::Status CheckWellFormed(const LinearProgram& lp) {
  const size_t n = lp.objective.size();
  if (n == 0) return absl::InvalidArgumentError("LP has no variables");
  auto finite_row = [&](const LpRow& row, const char* kind,
                        size_t i) -> absl::Status {
    if (row.coeffs.size() != n) {
      return absl::InvalidArgumentError(absl::StrCat(
          kind, " row ", i, " has ", row.coeffs.size(), " coefficients, expected ",
          n));
    }
    for (double v : row.coeffs) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat(kind, " row ", i, " has a non-finite coefficient"));
      }
    }
    if (!std::isfinite(row.rhs)) {
      return absl::InvalidArgumentError(
          absl::StrCat(kind, " row ", i, " has a non-finite bound"));
    }
    return absl::OkStatus();
  };
  for (double v : lp.objective) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("non-finite objective coefficient");
    }
  }
  for (size_t i = 0; i < lp.ineq.size(); ++i) {
    if (auto st = finite_row(lp.ineq[i], "inequality", i); !st.ok()) return st;
  }
  for (size_t i = 0; i < lp.eq.size(); ++i) {
    if (auto st = finite_row(lp.eq[i], "equality", i); !st.ok()) return st;
  }
  if (!lp.lower_bounds.empty()) {
    if (lp.lower_bounds.size() != n) {
      return absl::InvalidArgumentError("lower_bounds size mismatch");
    }
    for (double l : lp.lower_bounds) {
      if (std::isnan(l) || l == std::numeric_limits<double>::infinity()) {
        return absl::InvalidArgumentError("lower bound must be finite or -inf");
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<LpSolution> SolveImpl(const LinearProgram& lp, bool phase2) {
  if (auto st = CheckWellFormed(lp); !st.ok()) return st;
  const int n = lp.num_vars();
  std::vector<double> lb(n, 0.0);
  if (!lp.lower_bounds.empty()) lb = lp.lower_bounds;

  // Column map: x_j = lb_j + y_j, or y_plus - y_minus for free variables.
  std::vector<int> plus_col(n), minus_col(n, -1);
  int n_struct = 0;
  for (int j = 0; j < n; ++j) {
    plus_col[j] = n_struct++;
    if (std::isinf(lb[j])) minus_col[j] = n_struct++;
  }
  const int m_ineq = static_cast<int>(lp.ineq.size());
  const int m_eq = static_cast<int>(lp.eq.size());
  const int m = m_ineq + m_eq;

  std::vector<double> shifted_rhs(m);
  std::vector<bool> negate(m, false);
  int n_art = 0;
  double rhs_scale = 1.0;
  for (int i = 0; i < m; ++i) {
    const LpRow& row = i < m_ineq ? lp.ineq[i] : lp.eq[i - m_ineq];
    double r = row.rhs;
    for (int j = 0; j < n; ++j) {
      if (minus_col[j] < 0 && lb[j] != 0.0) r -= row.coeffs[j] * lb[j];
    }
    shifted_rhs[i] = r;
    negate[i] = r < 0.0;
    if (i >= m_ineq || negate[i]) ++n_art;
    rhs_scale = std::max(rhs_scale, std::fabs(r));
  }
  const int slack0 = n_struct;
  const int art0 = n_struct + m_ineq;
  const int cols = art0 + n_art;

  Tableau t(m, cols);
  int next_art = art0;
  for (int i = 0; i < m; ++i) {
    const LpRow& row = i < m_ineq ? lp.ineq[i] : lp.eq[i - m_ineq];
    const double sign = negate[i] ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      t.at(i, plus_col[j]) = sign * row.coeffs[j];
      if (minus_col[j] >= 0) t.at(i, minus_col[j]) = -sign * row.coeffs[j];
    }
    if (i < m_ineq) t.at(i, slack0 + i) = sign;
    t.rhs(i) = sign * shifted_rhs[i];
    if (i < m_ineq && !negate[i]) {
      t.basis()[i] = slack0 + i;
    } else {
      t.at(i, next_art) = 1.0;
      t.basis()[i] = next_art++;
    }
  }

  // Phase 1.
  if (n_art > 0) {
    std::vector<double> c1(cols, 0.0);
    for (int j = art0; j < cols; ++j) c1[j] = 1.0;
    t.PriceOut(c1);
    if (RunSimplex(t, cols) == Outcome::kStalled) {
      return absl::InternalError("simplex phase 1 did not terminate");
    }
    if (-t.obj()[cols] > kLpFeasTol * rhs_scale) {
      return LpSolution{.status = LpStatus::kInfeasible, .x = {}};
    }
    // Pivot remaining (zero-valued) artificials out; drop redundant rows.
    for (int r = t.rows() - 1; r >= 0; --r) {
      if (t.basis()[r] < art0) continue;
      int pc = -1;
      for (int j = 0; j < art0; ++j) {
        if (std::fabs(t.at(r, j)) > kLpPivotTol) {
          pc = j;
          break;
        }
      }
      if (pc >= 0) {
        t.Pivot(r, pc);
      } else {
        t.DropRow(r);
      }
    }
  }

  if (phase2) {
    std::vector<double> c2(cols, 0.0);
    for (int j = 0; j < n; ++j) {
      c2[plus_col[j]] = lp.objective[j];
      if (minus_col[j] >= 0) c2[minus_col[j]] = -lp.objective[j];
    }
    t.PriceOut(c2);
    const Outcome out = RunSimplex(t, art0);
    if (out == Outcome::kStalled) {
      return absl::InternalError("simplex phase 2 did not terminate");
    }
    if (out == Outcome::kUnbounded) {
      return LpSolution{.status = LpStatus::kUnbounded, .x = {}};
    }
  }

  std::vector<double> y(cols, 0.0);
  for (int r = 0; r < t.rows(); ++r) y[t.basis()[r]] = std::max(0.0, t.rhs(r));
  LpSolution sol;
  sol.status = LpStatus::kOptimal;
  sol.x.resize(n);
  for (int j = 0; j < n; ++j) {
    sol.x[j] = minus_col[j] >= 0 ? y[plus_col[j]] - y[minus_col[j]]
                                 : lb[j] + y[plus_col[j]];
  }
  double value = 0.0;
  for (int j = 0; j < n; ++j) value += lp.objective[j] * sol.x[j];
  sol.objective_value = phase2 ? value : 0.0;
  return sol;
}

}  // namespace

absl::StatusOr<LpSolution> Solve(const LinearProgram& lp) {
  return SolveImpl(lp, /*phase2=*/true);
}

absl::StatusOr<LpSolution> FeasiblePoint(const LinearProgram& lp) {
  return SolveImpl(lp, /*phase2=*/false);
}

double MaxViolation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  auto dot = [&](const std::vector<double>& c) {
    double s = 0.0;
    for (size_t j = 0; j < c.size(); ++j) s += c[j] * x[j];
    return s;
  };
  for (const LpRow& row : lp.ineq) {
    worst = std::max(worst, dot(row.coeffs) - row.rhs);
  }
  for (const LpRow& row : lp.eq) {
    worst = std::max(worst, std::fabs(dot(row.coeffs) - row.rhs));
  }
  for (size_t j = 0; j < x.size(); ++j) {
    const double l = lp.lower_bounds.empty() ? 0.0 : lp.lower_bounds[j];
    worst = std::max(worst, l - x[j]);
  }
  return worst;
}

}  // namespace dpnash
