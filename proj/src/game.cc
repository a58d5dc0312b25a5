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

#include "dpnash/game.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpnash {

absl::StatusOr<MarkovGame> MarkovGame::Create(GameDims dims,
                                              std::vector<double> rewards,
                                              std::vector<double> transitions,
                                              int initial_state) {
  if (!dims.Valid()) {
    return absl::InvalidArgumentError("game dimensions must be positive");
  }
  if (rewards.size() != dims.num_sab()) {
    return absl::InvalidArgumentError(
        absl::StrCat("reward table has ", rewards.size(), " entries, expected ",
                     dims.num_sab()));
  }
  if (transitions.size() != dims.num_sabs()) {
    return absl::InvalidArgumentError(
        absl::StrCat("transition table has ", transitions.size(),
                     " entries, expected ", dims.num_sabs()));
  }
  return MarkovGame(dims, std::move(rewards), std::move(transitions),
                    initial_state);
}

std::vector<Violation> ValidateGame(const MarkovGame& game) {
  const GameDims& d = game.dims();
  std::vector<Violation> out;
  if (game.initial_state() < 0 || game.initial_state() >= d.S) {
    out.push_back({.check = absl::StrCat("initial_state ",
                                         game.initial_state(),
                                         " outside [0, S)")});
  }
  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      for (int a = 0; a < d.A; ++a) {
        for (int b = 0; b < d.B; ++b) {
          const double r = game.reward(h, s, a, b);
          if (!(r >= 0.0 && r <= 1.0)) {
            out.push_back({h, s, a, b,
                           absl::StrCat("reward ", r, " outside [0, 1]")});
          }
          double sum = 0.0;
          bool negative = false;
          bool finite = true;
          for (double p : game.transition(h, s, a, b)) {
            if (!std::isfinite(p)) finite = false;
            if (p < 0.0) negative = true;
            sum += p;
          }
          if (!finite) {
            out.push_back({h, s, a, b, "transition row has non-finite entry"});
          } else if (negative) {
            out.push_back({h, s, a, b, "transition row has negative entry"});
          }
          if (finite && std::fabs(sum - 1.0) > 1e-12) {
            out.push_back({h, s, a, b,
                           absl::StrCat("transition row sums to ", sum)});
          }
        }
      }
    }
  }
  return out;
}

JointPolicy::JointPolicy(const GameDims& dims)
    : H_(dims.H),
      S_(dims.S),
      A_(dims.A),
      B_(dims.B),
      dist_(dims.num_sab(), 1.0 / (dims.A * dims.B)) {}

JointPolicy JointPolicy::PointMass(const GameDims& dims, int a, int b) {
  JointPolicy pi(dims);
  for (int h = 0; h < dims.H; ++h) {
    for (int s = 0; s < dims.S; ++s) {
      auto slice = pi.at(h, s);
      std::fill(slice.begin(), slice.end(), 0.0);
      slice[static_cast<size_t>(a) * dims.B + b] = 1.0;
    }
  }
  return pi;
}

namespace {

bool IsDistribution(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) return false;
    sum += x;
  }
  return std::fabs(sum - 1.0) <= tol;
}

void Normalize(std::span<double> p) {
  double sum = 0.0;
  for (double x : p) sum += x;
  if (sum > 0.0) {
    for (double& x : p) x /= sum;
  }
}

}  // namespace

bool JointPolicy::Valid(double tol) const {
  if (dist_.size() != static_cast<size_t>(H_) * S_ * A_ * B_ || dist_.empty()) {
    return false;
  }
  for (int h = 0; h < H_; ++h) {
    for (int s = 0; s < S_; ++s) {
      if (!IsDistribution(at(h, s), tol)) return false;
    }
  }
  return true;
}

MarginalPair::MarginalPair(const GameDims& dims)
    : H_(dims.H),
      S_(dims.S),
      A_(dims.A),
      B_(dims.B),
      mu_(static_cast<size_t>(dims.H) * dims.S * dims.A, 1.0 / dims.A),
      nu_(static_cast<size_t>(dims.H) * dims.S * dims.B, 1.0 / dims.B) {}

bool MarginalPair::Valid(double tol) const {
  if (mu_.size() != static_cast<size_t>(H_) * S_ * A_ ||
      nu_.size() != static_cast<size_t>(H_) * S_ * B_ || mu_.empty()) {
    return false;
  }
  for (int h = 0; h < H_; ++h) {
    for (int s = 0; s < S_; ++s) {
      if (!IsDistribution(mu(h, s), tol) || !IsDistribution(nu(h, s), tol)) {
        return false;
      }
    }
  }
  return true;
}

MarginalPair Marginals(const JointPolicy& pi) {
  MarginalPair out(GameDims{.S = pi.S(), .A = pi.A(), .B = pi.B(), .H = pi.H()});
  for (int h = 0; h < pi.H(); ++h) {
    for (int s = 0; s < pi.S(); ++s) {
      auto mu = out.mu(h, s);
      auto nu = out.nu(h, s);
      std::fill(mu.begin(), mu.end(), 0.0);
      std::fill(nu.begin(), nu.end(), 0.0);
      for (int a = 0; a < pi.A(); ++a) {
        for (int b = 0; b < pi.B(); ++b) {
          const double p = pi.prob(h, s, a, b);
          mu[a] += p;
          nu[b] += p;
        }
      }
      Normalize(mu);
      Normalize(nu);
    }
  }
  return out;
}

absl::StatusOr<Trajectory> RunEpisode(const MarkovGame& game,
                                      const JointPolicy& pi, CounterRng& rng) {
  const GameDims& d = game.dims();
  if (!pi.Matches(d)) {
    return absl::InvalidArgumentError(
        absl::StrCat("policy dims (H=", pi.H(), ", S=", pi.S(), ", A=", pi.A(),
                     ", B=", pi.B(), ") do not match the game"));
  }
  Trajectory traj;
  traj.steps.reserve(d.H);
  int s = game.initial_state();
  for (int h = 0; h < d.H; ++h) {
    const size_t pair = rng.Categorical(pi.at(h, s));
    const int a = static_cast<int>(pair / d.B);
    const int b = static_cast<int>(pair % d.B);
    traj.steps.push_back({s, a, b, game.reward(h, s, a, b)});
    s = static_cast<int>(rng.Categorical(game.transition(h, s, a, b)));
  }
  traj.terminal_state = s;
  return traj;
}

}  // namespace dpnash
