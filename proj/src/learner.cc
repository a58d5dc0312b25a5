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

#include "dpnash/learner.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnash/equilibrium.h"
#include "dpnash/evaluation.h"

namespace dpnash {

ValueIterate::ValueIterate(const GameDims& d)
    : dims(d),
      q_upper(d.num_sab(), 0.0),
      q_lower(d.num_sab(), 0.0),
      v_upper(static_cast<size_t>(d.H + 1) * d.S, 0.0),
      v_lower(static_cast<size_t>(d.H + 1) * d.S, 0.0),
      gamma(d.num_sab(), 0.0),
      Gamma(d.num_sab(), 0.0),
      p_tilde(d.num_sabs(), 0.0) {}

absl::Status LearnerConfig::Validate() const {
  if (K < 1) return absl::InvalidArgumentError("K must be >= 1");
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    return absl::InvalidArgumentError("C1 and C2 must be positive");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  if (error_bound && !(*error_bound >= 0.0 && std::isfinite(*error_bound))) {
    return absl::InvalidArgumentError("error bound must be finite and >= 0");
  }
  return privatizer.Validate();
}

double Iota(const GameDims& d, int K, double beta) {
  return std::log(30.0 * d.H * d.S * d.A * d.B * static_cast<double>(K) / beta);
}

void PrivateTransition(std::span<const double> nt_sabs, double nt_sab,
                       std::span<double> out) {
  const size_t S = nt_sabs.size();
  if (nt_sab <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(S));
    return;
  }
  for (size_t n = 0; n < S; ++n) out[n] = nt_sabs[n] / nt_sab;
}

double TransitionGapBonus(std::span<const double> p,
                          std::span<const double> v_upper,
                          std::span<const double> v_lower, double c1, int H) {
  double acc = 0.0;
  for (size_t n = 0; n < p.size(); ++n) acc += p[n] * (v_upper[n] - v_lower[n]);
  return std::max(0.0, c1 / H * acc);
}

double PrivateBernsteinBonus(std::span<const double> p,
                             std::span<const double> v_upper,
                             std::span<const double> v_lower, double nt,
                             double E, double iota, double c2, int H, int S) {
  const double n_eff = nt > 0.0 ? nt : 1.0;
  // Two-pass variance of the midpoint values under p.
  double mean = 0.0;
  for (size_t n = 0; n < p.size(); ++n) {
    mean += p[n] * 0.5 * (v_upper[n] + v_lower[n]);
  }
  double var = 0.0;
  for (size_t n = 0; n < p.size(); ++n) {
    const double dev = 0.5 * (v_upper[n] + v_lower[n]) - mean;
    var += p[n] * dev * dev;
  }
  var = std::max(0.0, var);
  return c2 * std::sqrt(var * iota / n_eff) + c2 * H * S * E * iota / n_eff +
         c2 * static_cast<double>(H) * H * S * iota / n_eff;
}

absl::StatusOr<PlanResult> Plan(const MarkovGame& game,
                                const PrivateCounts& counts, double c1,
                                double c2, double iota) {
  const GameDims& d = game.dims();
  if (!counts.dims.SameGame(d) || counts.nt_sab.size() != d.num_sab() ||
      counts.nt_sabs.size() != d.num_sabs()) {
    return absl::InvalidArgumentError("private counts do not match the game");
  }
  PlanResult out{ValueIterate(d), JointPolicy(d)};
  ValueIterate& vi = out.values;
  const double H = d.H;
  const double E = counts.error_bound;
  PayoffPair pp{Matrix(d.A, d.B), Matrix(d.A, d.B), H};
  for (int h = d.H - 1; h >= 0; --h) {
    std::span<const double> vu_next(vi.v_upper.data() + d.hs(h + 1, 0), d.S);
    std::span<const double> vl_next(vi.v_lower.data() + d.hs(h + 1, 0), d.S);
    for (int s = 0; s < d.S; ++s) {
      for (int a = 0; a < d.A; ++a) {
        for (int b = 0; b < d.B; ++b) {
          const size_t c = d.sab(h, s, a, b);
          std::span<double> p(vi.p_tilde.data() + c * d.S, d.S);
          PrivateTransition({counts.nt_sabs.data() + c * d.S,
                             static_cast<size_t>(d.S)},
                            counts.nt_sab[c], p);
          const double g = TransitionGapBonus(p, vu_next, vl_next, c1, d.H);
          const double G = PrivateBernsteinBonus(
              p, vu_next, vl_next, counts.nt_sab[c], E, iota, c2, d.H, d.S);
          double pv_up = 0.0, pv_lo = 0.0;
          for (int n = 0; n < d.S; ++n) {
            pv_up += p[n] * vu_next[n];
            pv_lo += p[n] * vl_next[n];
          }
          const double r = game.reward(h, s, a, b);
          vi.gamma[c] = g;
          vi.Gamma[c] = G;
          vi.q_upper[c] = std::min(r + pv_up + g + G, H);
          vi.q_lower[c] = std::max(r + pv_lo - g - G, 0.0);
        }
      }
      for (int a = 0; a < d.A; ++a) {
        for (int b = 0; b < d.B; ++b) {
          pp.q_upper(a, b) = vi.q_upper[d.sab(h, s, a, b)];
          pp.q_lower(a, b) = vi.q_lower[d.sab(h, s, a, b)];
        }
      }
      auto cce = ComputeCce(pp);
      if (!cce.ok()) return cce.status();
      auto slice = out.policy.at(h, s);
      std::copy(cce->begin(), cce->end(), slice.begin());
      double vu = 0.0, vl = 0.0;
      for (size_t j = 0; j < slice.size(); ++j) {
        vu += slice[j] * pp.q_upper.data[j];
        vl += slice[j] * pp.q_lower.data[j];
      }
      vi.v_upper[d.hs(h, s)] = vu;
      vi.v_lower[d.hs(h, s)] = vl;
    }
  }
  return out;
}

absl::StatusOr<RunResult> Run(const MarkovGame& game, const LearnerConfig& cfg,
                              const EpisodeObserver& observer) {
  if (auto st = cfg.Validate(); !st.ok()) return st;
  if (auto v = ValidateGame(game); !v.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid game: ", v.front().check));
  }
  GameDims dims = game.dims();
  dims.K = cfg.K;

  RunResult result;
  result.config = cfg;
  result.iota = Iota(dims, cfg.K, cfg.beta);
  if (cfg.privatizer.type == PrivatizerKind::Type::kNone) {
    result.error_bound = 0.0;
  } else if (cfg.zero_noise) {
    result.error_bound = cfg.error_bound.value_or(0.0);
  } else if (cfg.error_bound) {
    result.error_bound = *cfg.error_bound;
  } else {
    CalibrationOptions copt = cfg.calibration;
    copt.zero_noise = false;
    auto cal = CalibrateE(cfg.privatizer, dims, cfg.beta, copt);
    if (!cal.ok()) return cal.status();
    result.calibration = *cal;
    result.error_bound = cal->E;
  }

  auto privatizer = MakePrivatizer(
      cfg.privatizer, dims, result.error_bound,
      PrivatizerOptions{.seed = cfg.seed, .zero_noise = cfg.zero_noise});
  if (!privatizer.ok()) return privatizer.status();

  auto counts = (*privatizer)->Release();
  if (!counts.ok()) return counts.status();

  const int s1 = game.initial_state();
  double best_delta = dims.H;
  double cum = 0.0;
  result.per_episode.reserve(cfg.K);
  for (int k = 1; k <= cfg.K; ++k) {
    auto plan = Plan(game, *counts, cfg.c1, cfg.c2, result.iota);
    if (!plan.ok()) return plan.status();
    const double delta = plan->values.vu(0, s1) - plan->values.vl(0, s1);

    CounterRng env(cfg.seed, StreamId(StreamTag::kEnvironment, k));
    auto traj = RunEpisode(game, plan->policy, env);
    if (!traj.ok()) return traj.status();

    const MarginalPair marg = Marginals(plan->policy);
    auto gap = EvaluateGap(game, marg);
    if (!gap.ok()) return gap.status();
    cum += std::max(0.0, gap->gap);
    result.per_episode.push_back({.k = k,
                                  .delta_gap = delta,
                                  .true_gap = gap->gap,
                                  .cum_regret = cum,
                                  .v_upper1 = plan->values.vu(0, s1),
                                  .v_lower1 = plan->values.vl(0, s1),
                                  .br_max = gap->br_max,
                                  .br_min = gap->br_min});
    if (k == 1 || delta < best_delta) {
      if (delta < best_delta) best_delta = delta;
      result.output_policy = plan->policy;
      result.output_marginals = marg;
      result.output_episode = k;
    }
    if (observer) observer(EpisodeView{k, *counts, *plan, *traj});

    if (auto st = (*privatizer)->Absorb(*traj); !st.ok()) return st;
    counts = (*privatizer)->Release();
    if (!counts.ok()) return counts.status();
  }
  return result;
}

}  // namespace dpnash
