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

#ifndef DPNASH_GAME_H_
#define DPNASH_GAME_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpnash/rng.h"

namespace dpnash {

// Sizes of a tabular two-player zero-sum episodic Markov game. K is the
// episode budget of a run and is not part of the game itself.
struct GameDims {
  int S = 1;
  int A = 1;
  int B = 1;
  int H = 1;
  int K = 1;

  bool Valid() const { return S >= 1 && A >= 1 && B >= 1 && H >= 1 && K >= 1; }

  size_t num_sab() const { return static_cast<size_t>(H) * S * A * B; }
  size_t num_sabs() const { return num_sab() * S; }

  // Dense zero-based layout (h, s, a, b[, s']).
  size_t sab(int h, int s, int a, int b) const {
    return ((static_cast<size_t>(h) * S + s) * A + a) * B + b;
  }
  size_t sabs(int h, int s, int a, int b, int next) const {
    return sab(h, s, a, b) * S + next;
  }
  size_t hs(int h, int s) const { return static_cast<size_t>(h) * S + s; }

  bool SameGame(const GameDims& o) const {
    return S == o.S && A == o.A && B == o.B && H == o.H;
  }
};

// Immutable tabular Markov game. Rewards are deterministic and known to the
// learner; the max-player receives r and the min-player -r.
class MarkovGame {
 public:
  // Checks table sizes only; value-level checks live in ValidateGame.
  static absl::StatusOr<MarkovGame> Create(GameDims dims,
                                           std::vector<double> rewards,
                                           std::vector<double> transitions,
                                           int initial_state);

  const GameDims& dims() const { return dims_; }
  int initial_state() const { return initial_state_; }

  double reward(int h, int s, int a, int b) const {
    return rewards_[dims_.sab(h, s, a, b)];
  }
  std::span<const double> transition(int h, int s, int a, int b) const {
    return {transitions_.data() + dims_.sabs(h, s, a, b, 0),
            static_cast<size_t>(dims_.S)};
  }
  std::span<const double> rewards() const { return rewards_; }
  std::span<const double> transitions() const { return transitions_; }

 private:
  MarkovGame(GameDims dims, std::vector<double> rewards,
             std::vector<double> transitions, int initial_state)
      : dims_(dims),
        rewards_(std::move(rewards)),
        transitions_(std::move(transitions)),
        initial_state_(initial_state) {}

  GameDims dims_;
  std::vector<double> rewards_;      // [H][S][A][B]
  std::vector<double> transitions_;  // [H][S][A][B][S]
  int initial_state_;
};

struct Violation {
  // -1 marks a coordinate that does not apply.
  int h = -1;
  int s = -1;
  int a = -1;
  int b = -1;
  std::string check;
};

// Returns every broken MarkovGame invariant; empty means the game is valid.
std::vector<Violation> ValidateGame(const MarkovGame& game);

struct Step {
  int s = 0;
  int a = 0;
  int b = 0;
  double r = 0.0;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Trajectory {
  std::vector<Step> steps;
  int terminal_state = 0;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Correlated per-(h, s) distribution over action pairs, row-major in (a, b).
class JointPolicy {
 public:
  JointPolicy() = default;
  explicit JointPolicy(const GameDims& dims);  // uniform

  static JointPolicy PointMass(const GameDims& dims, int a, int b);

  int H() const { return H_; }
  int S() const { return S_; }
  int A() const { return A_; }
  int B() const { return B_; }

  std::span<double> at(int h, int s) {
    return {dist_.data() + Offset(h, s), static_cast<size_t>(A_ * B_)};
  }
  std::span<const double> at(int h, int s) const {
    return {dist_.data() + Offset(h, s), static_cast<size_t>(A_ * B_)};
  }
  double prob(int h, int s, int a, int b) const {
    return dist_[Offset(h, s) + static_cast<size_t>(a) * B_ + b];
  }
  std::span<const double> data() const { return dist_; }

  bool Matches(const GameDims& dims) const {
    return H_ == dims.H && S_ == dims.S && A_ == dims.A && B_ == dims.B;
  }
  // Each (h, s) slice nonnegative and summing to one within tol.
  bool Valid(double tol = 1e-9) const;

  friend bool operator==(const JointPolicy&, const JointPolicy&) = default;

 private:
  size_t Offset(int h, int s) const {
    return (static_cast<size_t>(h) * S_ + s) * A_ * B_;
  }

  int H_ = 0, S_ = 0, A_ = 0, B_ = 0;
  std::vector<double> dist_;
};

// Per-player Markov policies: mu over A and nu over B at every (h, s).
class MarginalPair {
 public:
  MarginalPair() = default;
  explicit MarginalPair(const GameDims& dims);  // uniform

  int H() const { return H_; }
  int S() const { return S_; }
  int A() const { return A_; }
  int B() const { return B_; }

  std::span<double> mu(int h, int s) {
    return {mu_.data() + (static_cast<size_t>(h) * S_ + s) * A_,
            static_cast<size_t>(A_)};
  }
  std::span<const double> mu(int h, int s) const {
    return {mu_.data() + (static_cast<size_t>(h) * S_ + s) * A_,
            static_cast<size_t>(A_)};
  }
  std::span<double> nu(int h, int s) {
    return {nu_.data() + (static_cast<size_t>(h) * S_ + s) * B_,
            static_cast<size_t>(B_)};
  }
  std::span<const double> nu(int h, int s) const {
    return {nu_.data() + (static_cast<size_t>(h) * S_ + s) * B_,
            static_cast<size_t>(B_)};
  }

  bool Matches(const GameDims& dims) const {
    return H_ == dims.H && S_ == dims.S && A_ == dims.A && B_ == dims.B;
  }
  bool Valid(double tol = 1e-9) const;

  friend bool operator==(const MarginalPair&, const MarginalPair&) = default;

 private:
  int H_ = 0, S_ = 0, A_ = 0, B_ = 0;
  std::vector<double> mu_;
  std::vector<double> nu_;
};

// mu(h,s)[a] = sum_b pi(h,s)[a,b] and nu(h,s)[b] = sum_a pi(h,s)[a,b],
// renormalized to absorb roundoff.
MarginalPair Marginals(const JointPolicy& pi);

// Samples one episode: (a_h, b_h) ~ pi(h, s_h), s_{h+1} ~ P_h(.|s_h, a_h, b_h).
absl::StatusOr<Trajectory> RunEpisode(const MarkovGame& game,
                                      const JointPolicy& pi, CounterRng& rng);

}  // namespace dpnash

#endif  // DPNASH_GAME_H_
