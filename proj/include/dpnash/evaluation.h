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

#ifndef DPNASH_EVALUATION_H_
#define DPNASH_EVALUATION_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpnash/equilibrium.h"
#include "dpnash/game.h"

namespace dpnash {

// Values for layers h = 0..H; layer H is terminal and identically zero.
struct ValueTable {
  int H = 0;
  int S = 0;
  std::vector<double> v;

  ValueTable() = default;
  ValueTable(int horizon, int states)
      : H(horizon), S(states), v(static_cast<size_t>(horizon + 1) * states, 0.0) {}

  double at(int h, int s) const { return v[static_cast<size_t>(h) * S + s]; }
  double& at(int h, int s) { return v[static_cast<size_t>(h) * S + s]; }
};

enum class Side { kMax, kMin };

// kMax: V^{dagger, nu} of the max-player's best response to pair.nu.
// kMin: V^{mu, dagger} of the min-player's best response to pair.mu.
// Ties in the inner max/min go to the lower action index.
absl::StatusOr<ValueTable> BestResponseValue(const MarkovGame& game,
                                             const MarginalPair& pair,
                                             Side side);

struct NashSolution {
  ValueTable values;
  // Stage-game equilibrium mixes, indexed by dims.hs(h, s).
  std::vector<std::vector<double>> row_mix;
  std::vector<std::vector<double>> col_mix;
};

// Backward induction over stage games M(a,b) = r + P V*(h+1). The value at
// each stage is taken from the LP of `side`.
absl::StatusOr<NashSolution> NashValues(const MarkovGame& game,
                                        LpSide side = LpSide::kRow);

struct GapBreakdown {
  double br_max = 0.0;  // V^{dagger, nu}(s_1)
  double br_min = 0.0;  // V^{mu, dagger}(s_1)
  double gap = 0.0;
};

absl::StatusOr<GapBreakdown> EvaluateGap(const MarkovGame& game,
                                         const MarginalPair& pair);

// V^{dagger,nu}(s_1) - V^{mu,dagger}(s_1).
absl::StatusOr<double> EpisodeGap(const MarkovGame& game,
                                  const MarginalPair& pair);

// Partial sums of per-episode gaps with roundoff negatives clamped to zero.
std::vector<double> CumulativeRegret(std::span<const double> gaps);

}  // namespace dpnash

#endif  // DPNASH_EVALUATION_H_
