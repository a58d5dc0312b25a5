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

// Acceptance gate. Prints one PASS/FAIL line per criterion.
//
//   acceptance_test          run every criterion
//   acceptance_test 3 7      run the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpnash/equilibrium.h"
#include "dpnash/evaluation.h"
#include "dpnash/harness.h"
#include "dpnash/learner.h"
#include "dpnash/privacy.h"
#include "test_util.h"

namespace dpnash {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Verdict()> run;
};

// 1. Consistency restoration under the quarter-E condition.
Verdict Assumption1Suite() {
  CounterRng rng(101, StreamId(StreamTag::kTest, 1001));
  int passed = 0;
  const int instances = 200;
  for (int i = 0; i < instances; ++i) {
    const int S = 1 + static_cast<int>(rng.NextU64() % 4);
    const double E = 0.25 + 40.0 * rng.Uniform01();
    // Every fifth instance pushes the noise to the edge of the condition.
    const bool edge = i % 5 == 0;
    auto noise = [&] {
      const double u = 2.0 * rng.Uniform01() - 1.0;
      return E / 4.0 * (edge ? (u < 0 ? -1.0 : 1.0) : u);
    };
    std::vector<double> n(S), nhat(S);
    double n_sab = 0.0;
    for (int s = 0; s < S; ++s) {
      n[s] = (rng.NextU64() % 3 == 0) ? 0.0 : static_cast<double>(rng.NextU64() % 200);
      n_sab += n[s];
      nhat[s] = n[s] + noise();
    }
    const double nhat_sab = n_sab + noise();
    auto out = Postprocess(nhat, nhat_sab, E);
    if (out.ok() &&
        testing::Assumption1Holds(out->nt_sabs, out->nt_sab, n, n_sab, E)) {
      ++passed;
    }
  }
  return {passed == instances, absl::StrCat(passed, "/", instances, " instances")};
}

// 2. CCE certificates, checked by direct substitution.
Verdict CceCertificates() {
  CounterRng rng(202, StreamId(StreamTag::kTest, 1002));
  const double H = 5.0;
  int passed = 0;
  double worst = 0.0;
  const int instances = 1000;
  for (int i = 0; i < instances; ++i) {
    const int A = 1 + static_cast<int>(rng.NextU64() % 4);
    const int B = 1 + static_cast<int>(rng.NextU64() % 4);
    PayoffPair pp{Matrix(A, B), Matrix(A, B), H};
    for (size_t j = 0; j < pp.q_upper.data.size(); ++j) {
      pp.q_upper.data[j] = H * rng.Uniform01();
      pp.q_lower.data[j] = std::min(H * rng.Uniform01(), pp.q_upper.data[j]);
    }
    auto pi = ComputeCce(pp);
    if (!pi.ok()) continue;
    double viol = 0.0, total = 0.0;
    for (double p : *pi) {
      viol = std::max(viol, -p);
      total += p;
    }
    viol = std::max(viol, std::fabs(total - 1.0));
    double up = 0.0, lo = 0.0;
    for (int a = 0; a < A; ++a)
      for (int b = 0; b < B; ++b) {
        up += (*pi)[a * B + b] * pp.q_upper(a, b);
        lo += (*pi)[a * B + b] * pp.q_lower(a, b);
      }
    for (int dev = 0; dev < A; ++dev) {
      double d = 0.0;
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b) d += (*pi)[a * B + b] * pp.q_upper(dev, b);
      viol = std::max(viol, d - up);
    }
    for (int dev = 0; dev < B; ++dev) {
      double d = 0.0;
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b) d += (*pi)[a * B + b] * pp.q_lower(a, dev);
      viol = std::max(viol, lo - d);
    }
    worst = std::max(worst, viol);
    if (viol <= 1e-6) ++passed;
  }
  return {passed == instances,
          absl::StrFormat("%d/%d certified, worst violation %.3g", passed,
                          instances, worst)};
}

// 3. Best responses against enumeration; row LP against column LP.
Verdict OracleEquivalence() {
  CounterRng rng(303, StreamId(StreamTag::kTest, 1003));
  int passed = 0;
  double worst_br = 0.0, worst_lp = 0.0;
  const int instances = 100;
  for (int i = 0; i < instances; ++i) {
    auto dim = [&] { return 1 + static_cast<int>(rng.NextU64() % 2); };
    GameDims d{dim(), dim(), dim(), dim(), 1};
    auto game = testing::RandomGame(d, 3000 + i);
    MarginalPair pair = testing::RandomMarginals(d, rng);
    bool ok = true;
    for (Side side : {Side::kMax, Side::kMin}) {
      auto v = BestResponseValue(game, pair, side);
      if (!v.ok()) {
        ok = false;
        continue;
      }
      const double err = std::fabs(v->at(0, game.initial_state()) -
                                   testing::EnumerateBestResponse(game, pair, side));
      worst_br = std::max(worst_br, err);
      ok = ok && err <= 1e-12;
    }
    auto row = NashValues(game, LpSide::kRow);
    auto col = NashValues(game, LpSide::kColumn);
    if (!row.ok() || !col.ok()) {
      ok = false;
    } else {
      for (size_t j = 0; j < row->values.v.size(); ++j) {
        const double err = std::fabs(row->values.v[j] - col->values.v[j]);
        worst_lp = std::max(worst_lp, err);
        ok = ok && err <= 1e-7;
      }
    }
    if (ok) ++passed;
  }
  return {passed == instances,
          absl::StrFormat("%d/%d games, worst br error %.3g, worst row/col %.3g",
                          passed, instances, worst_br, worst_lp)};
}

// 4. Zero-noise private runs against the non-private learner.
Verdict ZeroNoiseReduction() {
  auto game = *GenerateGame({GeneratorSpec::Kind::kRandom, {2, 2, 2, 2, 1}, 4});
  const int K = 1000;
  int traces_equal = 0, runs = 0;
  int64_t count_mismatches = 0;
  for (uint64_t seed : {1, 2, 3}) {
    LearnerConfig base{.K = K, .seed = seed};
    auto none = Run(game, base);
    if (!none.ok()) return {false, none.status().ToString()};
    const std::string none_csv = TraceCsv(*none, 1);
    for (auto kind : {PrivatizerKind::Central(1.0), PrivatizerKind::Local(1.0)}) {
      LearnerConfig cfg = base;
      cfg.privatizer = kind;
      cfg.zero_noise = true;
      CountTables truth(game.dims());
      auto result = Run(game, cfg, [&](const EpisodeView& view) {
        // The counts used at episode k must equal those of episodes 1..k-1.
        for (size_t c = 0; c < truth.n_sab.size(); ++c) {
          count_mismatches += view.counts.nt_sab[c] != truth.n_sab[c];
        }
        for (size_t c = 0; c < truth.n_sabs.size(); ++c) {
          count_mismatches += view.counts.nt_sabs[c] != truth.n_sabs[c];
        }
        (void)RecordEpisode(truth, view.trajectory);
      });
      if (!result.ok()) return {false, result.status().ToString()};
      ++runs;
      bool same = TraceCsv(*result, 1) == none_csv &&
                  result->output_policy == none->output_policy;
      for (int k = 0; k < K && same; ++k) {
        const EpisodeRecord& a = result->per_episode[k];
        const EpisodeRecord& b = none->per_episode[k];
        same = a.delta_gap == b.delta_gap && a.true_gap == b.true_gap &&
               a.cum_regret == b.cum_regret && a.v_upper1 == b.v_upper1 &&
               a.v_lower1 == b.v_lower1;
      }
      traces_equal += same;
    }
  }
  return {traces_equal == runs && count_mismatches == 0,
          absl::StrCat(traces_equal, "/", runs, " traces bitwise equal, ",
                       count_mismatches, " count mismatches")};
}

// 5. Structural sandwich on every plan of full runs.
Verdict DeterministicSandwich() {
  auto game = *GenerateGame({GeneratorSpec::Kind::kRandom, {3, 2, 2, 3, 1}, 5});
  const GameDims& d = game.dims();
  int64_t plans = 0, bad = 0;
  for (auto kind : {PrivatizerKind::None(), PrivatizerKind::Central(1.0),
                    PrivatizerKind::Local(1.0)}) {
    LearnerConfig cfg{.K = 2000, .privatizer = kind, .seed = 11};
    auto result = Run(game, cfg, [&](const EpisodeView& view) {
      ++plans;
      const ValueIterate& vi = view.plan.values;
      for (size_t c = 0; c < d.num_sab(); ++c) {
        bad += !(0.0 <= vi.q_lower[c] && vi.q_lower[c] <= vi.q_upper[c] &&
                 vi.q_upper[c] <= d.H);
      }
      for (size_t i = 0; i < vi.v_upper.size(); ++i) {
        bad += !(vi.v_lower[i] <= vi.v_upper[i]);
      }
    });
    if (!result.ok()) return {false, result.status().ToString()};
  }
  return {bad == 0 && plans == 6000,
          absl::StrCat(plans, " plans, ", bad, " violations")};
}

// 6. Optimism and pessimism bracket the best responses.
Verdict StochasticSandwich() {
  auto game = *GenerateGame({GeneratorSpec::Kind::kRandom, {2, 2, 2, 2, 1}, 6});
  int good = 0;
  const int runs = 100;
  for (uint64_t seed = 1; seed <= runs; ++seed) {
    auto result = Run(game, {.K = 500, .c1 = 1.0, .c2 = 2.0, .beta = 0.05, .seed = seed});
    if (!result.ok()) return {false, result.status().ToString()};
    bool all = true;
    for (const EpisodeRecord& r : result->per_episode) {
      all = all && r.v_upper1 >= r.br_max && r.br_max >= r.br_min &&
            r.br_min >= r.v_lower1;
    }
    good += all;
  }
  return {good >= 95, absl::StrCat(good, "/", runs, " runs hold for every k")};
}

// Matching-pennies gap in closed form: max(nu) - min(mu).
double PenniesGap(const MarginalPair& m) {
  auto mu = m.mu(0, 0);
  auto nu = m.nu(0, 0);
  return std::max(nu[0], nu[1]) - std::min(mu[0], mu[1]);
}

struct PenniesRuns {
  std::vector<double> ratios;
  std::vector<double> output_gaps;
  std::string error;
};

const PenniesRuns& MatchingPenniesRuns() {
  static const PenniesRuns runs = [] {
    PenniesRuns out;
    auto game = testing::MatchingPennies();
    const int K = 20000;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      std::vector<double> regret;
      regret.reserve(K);
      double cum = 0.0;
      auto result = Run(game, {.K = K, .seed = seed}, [&](const EpisodeView& v) {
        cum += PenniesGap(Marginals(v.plan.policy));
        regret.push_back(cum);
      });
      if (!result.ok()) {
        out.error = result.status().ToString();
        return out;
      }
      out.ratios.push_back(regret[K - 1] / regret[K / 4 - 1]);
      out.output_gaps.push_back(PenniesGap(result->output_marginals));
    }
    return out;
  }();
  return runs;
}

// 7. Regret growth between K/4 and K.
Verdict SublinearRegret() {
  const PenniesRuns& runs = MatchingPenniesRuns();
  if (!runs.error.empty()) return {false, runs.error};
  const double median = testing::Median(runs.ratios);
  return {median <= 2.8,
          absl::StrFormat("median Regret(K)/Regret(K/4) = %.4f", median)};
}

// 8. Output policy quality.
Verdict PacOutput() {
  const PenniesRuns& runs = MatchingPenniesRuns();
  if (!runs.error.empty()) return {false, runs.error};
  const double median = testing::Median(runs.output_gaps);
  return {median <= 0.1, absl::StrFormat("median output gap = %.4g", median)};
}

// 9. Privacy cost ordering of median regret.
Verdict PrivacyCostOrdering() {
  auto game = *GenerateGame({GeneratorSpec::Kind::kRandom, {2, 2, 2, 2, 1}, 9});
  GameDims dims = game.dims();
  dims.K = 10000;
  struct Arm {
    const char* label;
    PrivatizerKind kind;
    double median = 0.0;
    double E = 0.0;
  };
  std::vector<Arm> arms = {{"none", PrivatizerKind::None()},
                           {"central(10)", PrivatizerKind::Central(10.0)},
                           {"central(0.5)", PrivatizerKind::Central(0.5)},
                           {"local(10)", PrivatizerKind::Local(10.0)},
                           {"central(1)", PrivatizerKind::Central(1.0)},
                           {"local(1)", PrivatizerKind::Local(1.0)}};
  for (Arm& arm : arms) {
    LearnerConfig cfg{.K = dims.K, .privatizer = arm.kind};
    if (arm.kind.type != PrivatizerKind::Type::kNone) {
      auto cal = CalibrateE(arm.kind, dims, cfg.beta);
      if (!cal.ok()) return {false, cal.status().ToString()};
      cfg.error_bound = arm.E = cal->E;
    }
    std::vector<double> finals;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      cfg.seed = seed;
      auto result = Run(game, cfg);
      if (!result.ok()) return {false, result.status().ToString()};
      finals.push_back(result->per_episode.back().cum_regret);
    }
    arm.median = testing::Median(finals);
  }
  const double none = arms[0].median, c10 = arms[1].median, c05 = arms[2].median,
               l10 = arms[3].median, c1 = arms[4].median, l1 = arms[5].median;
  std::string detail;
  for (const Arm& arm : arms) {
    absl::StrAppendFormat(&detail, "%s%s=%.2f (E=%.4g)", detail.empty() ? "" : ", ",
                          arm.label, arm.median, arm.E);
  }
  const bool chain = none <= c10 && c10 <= c05;
  const bool local = none <= l10;
  const bool matched = l1 > c1;
  absl::StrAppendFormat(&detail,
                        "; none<=central(10)<=central(0.5): %s; none<=local(10): "
                        "%s; local(1)>central(1): %s",
                        chain ? "yes" : "no", local ? "yes" : "no",
                        matched ? "yes" : "no");
  return {chain && local && matched, detail};
}

// Independent re-simulation of the uniform quarter-E event on fresh draws.
double HeldOutFrequency(const PrivatizerKind& kind, const GameDims& d, double E,
                        int realizations) {
  int hits = 0;
  const size_t streams = d.num_sab() + d.num_sabs();
  for (int r = 0; r < realizations; ++r) {
    const uint64_t seed = 0x5eed0000u + r;
    double worst = 0.0;
    if (kind.type == PrivatizerKind::Type::kCentral) {
      const double scale = CentralNoiseFor(kind.epsilon, d.H, d.K).node_scale;
      for (size_t i = 0; i < streams; ++i) {
        BinaryCounter ctr(d.K, scale, seed, StreamId(StreamTag::kTest, i));
        for (int t = 1; t < d.K; ++t) {
          (void)ctr.Update(0);
          worst = std::max(worst, std::fabs(*ctr.Query(t)));
        }
      }
    } else {
      const double scale = LocalNoiseScale(kind.epsilon, d.H);
      for (size_t i = 0; i < streams; ++i) {
        CounterRng rng(seed, StreamId(StreamTag::kTest, i));
        double sum = 0.0;
        for (int t = 1; t < d.K; ++t) {
          sum += rng.Laplace(scale);
          worst = std::max(worst, std::fabs(sum));
        }
      }
    }
    hits += worst <= E / 4.0;
  }
  return static_cast<double>(hits) / realizations;
}

// 10. E certification and the square-root growth of the local envelope.
Verdict ECertification() {
  const double beta = 0.1;
  GameDims d{2, 2, 2, 2, 1000};
  GameDims d4 = d;
  d4.K = 4000;
  const CalibrationOptions opts{.realizations = 200};
  auto central = CalibrateE(PrivatizerKind::Central(1.0), d, beta, opts);
  auto local = CalibrateE(PrivatizerKind::Local(1.0), d, beta, opts);
  auto local4 = CalibrateE(PrivatizerKind::Local(1.0), d4, beta, opts);
  if (!central.ok() || !local.ok() || !local4.ok()) {
    return {false, "calibration failed"};
  }
  const double need = 1.0 - beta / 3.0;
  const double ratio = local4->E / local->E;
  const bool pass = central->certified_frequency >= need &&
                    local->certified_frequency >= need &&
                    central->realizations >= 200 && local->realizations >= 200 &&
                    ratio >= 1.8 && ratio <= 2.2;
  const double held_c = HeldOutFrequency(PrivatizerKind::Central(1.0), d, central->E, 200);
  const double held_l = HeldOutFrequency(PrivatizerKind::Local(1.0), d, local->E, 200);
  return {pass,
          absl::StrFormat("central E=%.4g freq=%.3f, local E=%.4g freq=%.3f "
                          "(need %.4f); local E(4K)/E(K)=%.4f; held-out freq "
                          "central %.3f local %.3f",
                          central->E, central->certified_frequency, local->E,
                          local->certified_frequency, need, ratio, held_c, held_l)};
}

int Main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "Assumption-1 suite", 10, Assumption1Suite},
      {2, "CCE certificate", 30, CceCertificates},
      {3, "Oracle equivalence", 30, OracleEquivalence},
      {4, "Zero-noise reduction", 60, ZeroNoiseReduction},
      {5, "Deterministic sandwich", 120, DeterministicSandwich},
      {6, "Stochastic sandwich", 300, StochasticSandwich},
      {7, "Sublinear regret", 300, SublinearRegret},
      {8, "PAC output quality", 300, PacOutput},
      {9, "Privacy-cost ordering", 900, PrivacyCostOrdering},
      {10, "E certification", 600, ECertification},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  for (const Criterion& c : all) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v = c.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %2d %-24s %s  %s [%.1fs, budget %.0fs%s]\n", c.id, c.name,
                pass ? "PASS" : "FAIL", v.detail.c_str(), secs, c.budget_seconds,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}

}  // namespace
}  // namespace dpnash

int main(int argc, char** argv) { return dpnash::Main(argc, argv); }
