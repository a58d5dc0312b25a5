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

#ifndef DPNASH_PRIVACY_H_
#define DPNASH_PRIVACY_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpnash/game.h"

namespace dpnash {

// True visitation counts N_h(s,a,b) and N_h(s,a,b,s').
struct CountTables {
  GameDims dims;
  std::vector<int64_t> n_sab;   // [H][S][A][B]
  std::vector<int64_t> n_sabs;  // [H][S][A][B][S]

  CountTables() = default;
  explicit CountTables(const GameDims& d)
      : dims(d), n_sab(d.num_sab(), 0), n_sabs(d.num_sabs(), 0) {}
};

// Adds one visit per step: (s_h, a_h, b_h) and (s_h, a_h, b_h, s_{h+1}).
absl::Status RecordEpisode(CountTables& counts, const Trajectory& traj);

// Counts handed to the learner. nt_sab(h,s,a,b) is, bit for bit, the
// left-to-right sum of nt_sabs(h,s,a,b,0..S-1).
struct PrivateCounts {
  GameDims dims;
  std::vector<double> nt_sab;
  std::vector<double> nt_sabs;
  double error_bound = 0.0;  // E
};

// Per-group outcome of checking PrivateCounts against the true counts.
struct AssumptionCheck {
  bool positive = true;          // nt_sabs > 0
  bool sabs_within_e = true;     // |nt_sabs - n_sabs| <= E
  bool sab_within_e = true;      // |nt_sab - n_sab| <= E
  bool sum_identity = true;      // nt_sab == sum_{s'} nt_sabs exactly
  bool no_underestimate = true;  // nt_sab >= n_sab

  bool ok() const {
    return positive && sabs_within_e && sab_within_e && sum_identity &&
           no_underestimate;
  }
};

AssumptionCheck CheckPrivateCounts(const PrivateCounts& pc,
                                   const CountTables& truth);

// Sums a row left to right; the summation order the identity is defined by.
double SumRow(std::span<const double> row);

// Continual counter over a bounded stream of 0/1 increments using the binary
// tree construction of Chan, Shi and Song. The p-sum of every dyadic node
// gets one Laplace(node_scale) draw, keyed by (seed, stream, node) and drawn
// when the node closes; the release at time t sums popcount(t) noisy p-sums.
class BinaryCounter {
 public:
  BinaryCounter(int capacity, double node_scale, uint64_t seed,
                uint64_t stream);

  // Absorbs the increment for time current_time() + 1.
  absl::Status Update(int increment);

  // Noisy prefix sum over [1, t], t <= current_time(). Query(0) == 0.
  absl::StatusOr<double> Query(int t) const;

  int current_time() const { return time_; }
  int capacity() const { return capacity_; }
  double node_scale() const { return node_scale_; }

  // Number of noisy p-sums combined by Query(t).
  static int NoiseTerms(int t);

  // Noise of node (level, index), where the node covers times
  // (index * 2^level, (index + 1) * 2^level].
  double NodeNoise(int level, int64_t index) const;

 private:
  int capacity_;
  double node_scale_;
  uint64_t seed_;
  uint64_t stream_;
  int time_ = 0;
  std::vector<int64_t> alpha_;       // exact p-sums per level
  std::vector<double> alpha_hat_;    // noisy p-sums per level
  std::vector<double> released_;     // released_[t]
};

struct PrivatizerKind {
  enum class Type { kNone, kCentral, kLocal };
  Type type = Type::kNone;
  double epsilon = 0.0;

  static PrivatizerKind None() { return {}; }
  static PrivatizerKind Central(double eps) { return {Type::kCentral, eps}; }
  static PrivatizerKind Local(double eps) { return {Type::kLocal, eps}; }

  absl::Status Validate() const;
  std::string Name() const;  // "none" | "central" | "local"
};

absl::StatusOr<PrivatizerKind> ParsePrivatizerKind(const std::string& name,
                                                   double epsilon);

// Binary-tree budget for the central privatizer: every stream runs with
// eps' = eps / (2 H log2 K), tree depth m = floor(log2 K) + 1 and node noise
// Laplace(m / eps'). log2 K is floored at 1 so K = 1 stays finite.
struct CentralNoise {
  double stream_epsilon = 0.0;
  int depth = 0;
  double node_scale = 0.0;
};
CentralNoise CentralNoiseFor(double epsilon, int H, int K);

// Local privatizer noise scale 2H / eps.
double LocalNoiseScale(double epsilon, int H);

// Per-episode indicator tables after user-side perturbation.
struct NoisyIndicators {
  std::vector<double> sigma_sab;
  std::vector<double> sigma_sabs;
};

// Adds independent Laplace(scale) noise to every entry of both indicator
// tables of one trajectory. Draw order: all sab entries, then all sabs
// entries, both in table layout order.
NoisyIndicators LaplacePerturbEpisode(const Trajectory& traj,
                                      const GameDims& dims, double scale,
                                      CounterRng& rng);

struct PostprocessResult {
  std::vector<double> nt_sabs;
  double nt_sab = 0.0;
  double t = 0.0;  // optimal max deviation from the noisy counts
};

// Restores consistency of one (h,s,a,b) cell. Solves
//   min_x max_s' |x_s' - nhat_sabs[s']|
//   s.t. |sum x - nhat_sab| <= E/4, x >= 0
// breaking ties by the smallest sum_s' |x_s' - nhat_sabs[s']|, then adds
// E/(2S) to each entry and sets nt_sab to their sum. E = 0 is accepted when
// the program stays feasible.
absl::StatusOr<PostprocessResult> Postprocess(
    std::span<const double> nhat_sabs, double nhat_sab, double E);

// Abstract source of private counts. Implementations own all noise state.
class Privatizer {
 public:
  virtual ~Privatizer() = default;

  // Consumes the trajectory of the episode that just finished.
  virtual absl::Status Absorb(const Trajectory& traj) = 0;

  // Counts for the next episode. Before any Absorb these are the counts
  // derived from an empty history.
  virtual absl::StatusOr<PrivateCounts> Release() = 0;

  virtual double error_bound() const = 0;
  virtual PrivatizerKind kind() const = 0;
};

struct PrivatizerOptions {
  uint64_t seed = 0;
  // Test hook: all noise scales are zero. The harness only sets it behind
  // --unsafe-zero-noise.
  bool zero_noise = false;
};

// dims.K is the stream capacity. E is the error envelope from CalibrateE
// (ignored for kind none).
absl::StatusOr<std::unique_ptr<Privatizer>> MakePrivatizer(
    const PrivatizerKind& kind, const GameDims& dims, double E,
    const PrivatizerOptions& options);

struct CalibrationOptions {
  int realizations = 200;              // certificate draws
  int estimation_realizations = 1000;  // draws behind the quantile estimate
  uint64_t seed = 0x9e3779b97f4a7c15ULL;
  bool zero_noise = false;
};

struct Calibration {
  double E = 0.0;
  double candidate = 0.0;    // closed form with constant 8
  double monte_carlo = 0.0;  // 4 x empirical (1 - beta/6) quantile
  double certified_frequency = 1.0;
  int realizations = 0;
  int estimation_realizations = 0;
};

// Closed-form envelope: central 8 (H/eps) ln(HSABK/beta)^2, local
// 8 (H/eps) sqrt(K ln(HSABK/beta)), none 0.
double CandidateE(const PrivatizerKind& kind, const GameDims& dims,
                  double beta);

// For each of `realizations` independent noise draws of the whole counter
// system, the largest |Nhat^k - N^k| over every stream and k in [1, K].
// The error does not depend on the data, so all increments are zero.
std::vector<double> SimulateMaxErrors(const PrivatizerKind& kind,
                                      const GameDims& dims, int realizations,
                                      uint64_t seed);

// Fraction of realizations whose max error is <= E/4.
double CertificateFrequency(std::span<const double> max_errors, double E);

// E = max(candidate, Monte Carlo); then raised in 5% steps until a fresh set
// of `realizations` draws certifies frequency >= 1 - beta/3.
absl::StatusOr<Calibration> CalibrateE(const PrivatizerKind& kind,
                                       const GameDims& dims, double beta,
                                       const CalibrationOptions& options = {});

}  // namespace dpnash

#endif  // DPNASH_PRIVACY_H_
