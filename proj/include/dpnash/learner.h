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

#ifndef DPNASH_LEARNER_H_
#define DPNASH_LEARNER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpnash/game.h"
#include "dpnash/privacy.h"

namespace dpnash {

// Optimistic/pessimistic tables of one planning pass. Layer h = H of the
// value tables is terminal and zero.
struct ValueIterate {
  GameDims dims;
  std::vector<double> q_upper;  // [H][S][A][B]
  std::vector<double> q_lower;
  std::vector<double> v_upper;  // [H+1][S]
  std::vector<double> v_lower;
  std::vector<double> gamma;    // transition-gap bonus
  std::vector<double> Gamma;    // private Bernstein bonus
  std::vector<double> p_tilde;  // [H][S][A][B][S]

  explicit ValueIterate(const GameDims& d);

  double vu(int h, int s) const { return v_upper[dims.hs(h, s)]; }
  double vl(int h, int s) const { return v_lower[dims.hs(h, s)]; }
};

struct LearnerConfig {
  int K = 1;
  double c1 = 1.0;
  double c2 = 2.0;
  double beta = 0.05;
  PrivatizerKind privatizer;
  uint64_t seed = 0;
  // Forces every privatizer noise scale to zero (and E to 0).
  bool zero_noise = false;
  // When set, used as E instead of running CalibrateE.
  std::optional<double> error_bound;
  CalibrationOptions calibration;

  absl::Status Validate() const;
};

// log(30 H S A B K / beta), natural log.
double Iota(const GameDims& dims, int K, double beta);

// nt_sabs / nt_sab, or uniform when nt_sab <= 0 (no data, no offsets).
void PrivateTransition(std::span<const double> nt_sabs, double nt_sab,
                       std::span<double> out);

// (c1 / H) * sum_s' p(s') (v_upper(s') - v_lower(s')).
double TransitionGapBonus(std::span<const double> p,
                          std::span<const double> v_upper,
                          std::span<const double> v_lower, double c1, int H);

// c2 sqrt(Var_p[(v_upper + v_lower)/2] iota / nt) + c2 H S E iota / nt
//   + c2 H^2 S iota / nt, with nt = 1 substituted when nt <= 0.
double PrivateBernsteinBonus(std::span<const double> p,
                             std::span<const double> v_upper,
                             std::span<const double> v_lower, double nt,
                             double E, double iota, double c2, int H, int S);

struct PlanResult {
  ValueIterate values;
  JointPolicy policy;
};

// One backward pass h = H-1..0: private kernel, bonuses, clipped UCB/LCB
// backups, and a CCE per state.
absl::StatusOr<PlanResult> Plan(const MarkovGame& game,
                                const PrivateCounts& counts, double c1,
                                double c2, double iota);

struct EpisodeRecord {
  int k = 0;
  double delta_gap = 0.0;  // (V_upper - V_lower)(s_1)
  double true_gap = 0.0;   // V^{dagger,nu^k}(s_1) - V^{mu^k,dagger}(s_1)
  double cum_regret = 0.0;
  double v_upper1 = 0.0;
  double v_lower1 = 0.0;
  double br_max = 0.0;
  double br_min = 0.0;
};

struct RunResult {
  std::vector<EpisodeRecord> per_episode;
  JointPolicy output_policy;
  MarginalPair output_marginals;
  int output_episode = 0;
  LearnerConfig config;
  double error_bound = 0.0;
  double iota = 0.0;
  Calibration calibration;
};

// Everything a caller may inspect after episode k has been planned and played.
struct EpisodeView {
  int k;
  const PrivateCounts& counts;  // counts the plan used
  const PlanResult& plan;
  const Trajectory& trajectory;
};
using EpisodeObserver = std::function<void(const EpisodeView&)>;

// Runs K episodes of plan -> deploy -> privatize. pi_out is the first policy
// to reach the smallest gap below H (pi^1 if none does).
absl::StatusOr<RunResult> Run(const MarkovGame& game, const LearnerConfig& cfg,
                              const EpisodeObserver& observer = nullptr);

}  // namespace dpnash

#endif  // DPNASH_LEARNER_H_
