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

#include "dpnash/evaluation.h"

#include <algorithm>

#include "absl/status/status.h"

namespace dpnash {

absl::StatusOr<ValueTable> BestResponseValue(const MarkovGame& game,
                                             const MarginalPair& pair,
                                             Side side) {
  const GameDims& d = game.dims();
  if (!pair.Matches(d)) {
    return absl::InvalidArgumentError("policy dims do not match the game");
  }
  ValueTable out(d.H, d.S);
  for (int h = d.H - 1; h >= 0; --h) {
    for (int s = 0; s < d.S; ++s) {
      // Backup of the stage cell (a, b) under V(h+1).
      auto cell = [&](int a, int b) {
        double q = game.reward(h, s, a, b);
        const auto row = game.transition(h, s, a, b);
        for (int n = 0; n < d.S; ++n) q += row[n] * out.at(h + 1, n);
        return q;
      };
      double best = 0.0;
      if (side == Side::kMax) {
        const auto nu = pair.nu(h, s);
        for (int a = 0; a < d.A; ++a) {
          double q = 0.0;
          for (int b = 0; b < d.B; ++b) q += nu[b] * cell(a, b);
          if (a == 0 || q > best) best = q;
        }
      } else {
        const auto mu = pair.mu(h, s);
        for (int b = 0; b < d.B; ++b) {
          double q = 0.0;
          for (int a = 0; a < d.A; ++a) q += mu[a] * cell(a, b);
          if (b == 0 || q < best) best = q;
        }
      }
      out.at(h, s) = best;
    }
  }
  return out;
}

absl::StatusOr<NashSolution> NashValues(const MarkovGame& game, LpSide side) {
  const GameDims& d = game.dims();
  NashSolution sol{ValueTable(d.H, d.S),
                   std::vector<std::vector<double>>(d.H * d.S),
                   std::vector<std::vector<double>>(d.H * d.S)};
  for (int h = d.H - 1; h >= 0; --h) {
    for (int s = 0; s < d.S; ++s) {
      Matrix m(d.A, d.B);
      for (int a = 0; a < d.A; ++a) {
        for (int b = 0; b < d.B; ++b) {
          double q = game.reward(h, s, a, b);
          const auto row = game.transition(h, s, a, b);
          for (int n = 0; n < d.S; ++n) q += row[n] * sol.values.at(h + 1, n);
          m(a, b) = q;
        }
      }
      auto stage = MatrixGameSolve(m);
      if (!stage.ok()) return stage.status();
      sol.values.at(h, s) =
          side == LpSide::kRow ? stage->value : stage->col_value;
      sol.row_mix[d.hs(h, s)] = std::move(stage->row_mix);
      sol.col_mix[d.hs(h, s)] = std::move(stage->col_mix);
    }
  }
  return sol;
}

absl::StatusOr<GapBreakdown> EvaluateGap(const MarkovGame& game,
                                         const MarginalPair& pair) {
  auto up = BestResponseValue(game, pair, Side::kMax);
  if (!up.ok()) return up.status();
  auto down = BestResponseValue(game, pair, Side::kMin);
  if (!down.ok()) return down.status();
  const int s1 = game.initial_state();
  GapBreakdown g;
  g.br_max = up->at(0, s1);
  g.br_min = down->at(0, s1);
  g.gap = g.br_max - g.br_min;
  return g;
}

absl::StatusOr<double> EpisodeGap(const MarkovGame& game,
                                  const MarginalPair& pair) {
  auto g = EvaluateGap(game, pair);
  if (!g.ok()) return g.status();
  return g->gap;
}

std::vector<double> CumulativeRegret(std::span<const double> gaps) {
  std::vector<double> out;
  out.reserve(gaps.size());
  double total = 0.0;
  for (double g : gaps) {
    total += std::max(0.0, g);
    out.push_back(total);
  }
  return out;
}

}  // namespace dpnash
