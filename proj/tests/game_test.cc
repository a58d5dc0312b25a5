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

#include <cmath>
#include <vector>

#include "dpnash/game_io.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpnash {
namespace {

MarkovGame UniformGame(const GameDims& d) {
  return *MarkovGame::Create(d, std::vector<double>(d.num_sab(), 0.5),
                             std::vector<double>(d.num_sabs(), 1.0 / d.S), 0);
}

TEST(ValidateGameTest, UniformGameIsValid) {
  EXPECT_TRUE(ValidateGame(UniformGame({3, 2, 2, 2, 1})).empty());
}

TEST(ValidateGameTest, NamesShortRow) {
  GameDims d{2, 2, 2, 2, 1};
  std::vector<double> p(d.num_sabs(), 0.5);
  p[d.sabs(1, 1, 0, 1, 0)] = 0.4;
  auto game = MarkovGame::Create(d, std::vector<double>(d.num_sab(), 0.5), p, 0);
  ASSERT_TRUE(game.ok());
  auto v = ValidateGame(*game);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].h, 1);
  EXPECT_EQ(v[0].s, 1);
  EXPECT_EQ(v[0].a, 0);
  EXPECT_EQ(v[0].b, 1);
  EXPECT_NE(v[0].check.find("sums to 0.9"), std::string::npos) << v[0].check;
}

TEST(ValidateGameTest, NamesRewardOutOfRange) {
  GameDims d{2, 2, 2, 2, 1};
  std::vector<double> r(d.num_sab(), 0.5);
  r[d.sab(0, 0, 0, 0)] = 1.5;
  auto game = MarkovGame::Create(d, r, std::vector<double>(d.num_sabs(), 0.5), 0);
  ASSERT_TRUE(game.ok());
  auto v = ValidateGame(*game);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].h, 0);
  EXPECT_EQ(v[0].s, 0);
  EXPECT_NE(v[0].check.find("reward"), std::string::npos);
}

TEST(ValidateGameTest, InitialStateOutOfRange) {
  GameDims d{2, 1, 1, 1, 1};
  auto game = MarkovGame::Create(d, {0.0, 0.0}, {0.5, 0.5, 0.5, 0.5}, 2);
  ASSERT_TRUE(game.ok());
  EXPECT_EQ(ValidateGame(*game).size(), 1u);
}

TEST(MarkovGameTest, CreateRejectsWrongSizes) {
  GameDims d{2, 1, 1, 1, 1};
  EXPECT_FALSE(MarkovGame::Create(d, {0.0}, {0.5, 0.5, 0.5, 0.5}, 0).ok());
  EXPECT_FALSE(MarkovGame::Create(d, {0.0, 0.0}, {1.0}, 0).ok());
}

TEST(MarginalsTest, UniformJoint) {
  GameDims d{1, 2, 2, 1, 1};
  MarginalPair m = Marginals(JointPolicy(d));
  EXPECT_DOUBLE_EQ(m.mu(0, 0)[0], 0.5);
  EXPECT_DOUBLE_EQ(m.mu(0, 0)[1], 0.5);
  EXPECT_DOUBLE_EQ(m.nu(0, 0)[0], 0.5);
  EXPECT_DOUBLE_EQ(m.nu(0, 0)[1], 0.5);
}

TEST(MarginalsTest, PointMass) {
  GameDims d{1, 2, 2, 1, 1};
  MarginalPair m = Marginals(JointPolicy::PointMass(d, 1, 0));
  EXPECT_EQ(m.mu(0, 0)[0], 0.0);
  EXPECT_EQ(m.mu(0, 0)[1], 1.0);
  EXPECT_EQ(m.nu(0, 0)[0], 1.0);
  EXPECT_EQ(m.nu(0, 0)[1], 0.0);
}

TEST(MarginalsTest, DirectSummation) {
  GameDims d{1, 2, 2, 1, 1};
  JointPolicy pi(d);
  auto slice = pi.at(0, 0);
  slice[0] = 0.5;
  slice[1] = 0.25;
  slice[2] = 0.25;
  slice[3] = 0.0;
  MarginalPair m = Marginals(pi);
  EXPECT_DOUBLE_EQ(m.mu(0, 0)[0], 0.75);
  EXPECT_DOUBLE_EQ(m.mu(0, 0)[1], 0.25);
  EXPECT_DOUBLE_EQ(m.nu(0, 0)[0], 0.75);
  EXPECT_DOUBLE_EQ(m.nu(0, 0)[1], 0.25);
}

TEST(MarginalsTest, SumToOneOnRandomJoints) {
  GameDims d{3, 3, 4, 2, 1};
  CounterRng rng(9, 0);
  for (int rep = 0; rep < 50; ++rep) {
    JointPolicy pi(d);
    for (int h = 0; h < d.H; ++h) {
      for (int s = 0; s < d.S; ++s) {
        auto slice = pi.at(h, s);
        double total = 0.0;
        for (double& x : slice) total += (x = rng.Exponential());
        for (double& x : slice) x /= total;
      }
    }
    MarginalPair m = Marginals(pi);
    for (int h = 0; h < d.H; ++h) {
      for (int s = 0; s < d.S; ++s) {
        double mu = 0.0, nu = 0.0;
        for (double x : m.mu(h, s)) mu += x;
        for (double x : m.nu(h, s)) nu += x;
        EXPECT_NEAR(mu, 1.0, 1e-9);
        EXPECT_NEAR(nu, 1.0, 1e-9);
      }
    }
  }
}

TEST(RunEpisodeTest, DeterministicGameGivesUniqueTrajectory) {
  // Three states on a cycle; pair (a, b) moves s -> (s + a + b) mod 3.
  GameDims d{3, 2, 2, 4, 1};
  std::vector<double> r(d.num_sab()), p(d.num_sabs(), 0.0);
  for (int h = 0; h < d.H; ++h)
    for (int s = 0; s < d.S; ++s)
      for (int a = 0; a < d.A; ++a)
        for (int b = 0; b < d.B; ++b) {
          r[d.sab(h, s, a, b)] = 0.1 * (s + a);
          p[d.sabs(h, s, a, b, (s + a + b) % 3)] = 1.0;
        }
  auto game = *MarkovGame::Create(d, r, p, 0);
  CounterRng rng(1, 0);
  auto traj = RunEpisode(game, JointPolicy::PointMass(d, 1, 0), rng);
  ASSERT_TRUE(traj.ok());
  ASSERT_EQ(traj->steps.size(), 4u);
  const int expected_states[] = {0, 1, 2, 0};
  for (int h = 0; h < 4; ++h) {
    EXPECT_EQ(traj->steps[h].s, expected_states[h]);
    EXPECT_EQ(traj->steps[h].a, 1);
    EXPECT_EQ(traj->steps[h].b, 0);
    EXPECT_DOUBLE_EQ(traj->steps[h].r, 0.1 * (expected_states[h] + 1));
  }
  EXPECT_EQ(traj->terminal_state, 1);
}

TEST(RunEpisodeTest, SingleStateReadsRewards) {
  GameDims d{1, 2, 3, 3, 1};
  auto game = testing::RandomGame(d, 4);
  CounterRng rng(2, 0);
  auto traj = RunEpisode(game, JointPolicy(d), rng);
  ASSERT_TRUE(traj.ok());
  for (int h = 0; h < d.H; ++h) {
    const Step& st = traj->steps[h];
    EXPECT_EQ(st.s, 0);
    EXPECT_EQ(st.r, game.reward(h, 0, st.a, st.b));
  }
  EXPECT_EQ(traj->terminal_state, 0);
}

TEST(RunEpisodeTest, SeededRepeatIsIdentical) {
  GameDims d{4, 3, 2, 5, 1};
  auto game = testing::RandomGame(d, 8);
  for (uint64_t stream = 0; stream < 20; ++stream) {
    CounterRng r1(77, stream), r2(77, stream);
    EXPECT_EQ(*RunEpisode(game, JointPolicy(d), r1),
              *RunEpisode(game, JointPolicy(d), r2));
  }
}

TEST(RunEpisodeTest, RejectsMismatchedPolicy) {
  auto game = testing::RandomGame({2, 2, 2, 2, 1}, 1);
  CounterRng rng(1, 0);
  EXPECT_FALSE(RunEpisode(game, JointPolicy(GameDims{2, 2, 3, 2, 1}), rng).ok());
}

TEST(RunEpisodeTest, EmpiricalTransitionFrequencies) {
  GameDims d{20, 4, 4, 1, 1};
  auto game = testing::RandomGame(d, 12);
  const int n = 100000;
  int entries = 0, within = 0;
  for (int a = 0; a < d.A; ++a) {
    for (int b = 0; b < d.B; ++b) {
      JointPolicy pi = JointPolicy::PointMass(d, a, b);
      std::vector<int> hits(d.S, 0);
      for (int i = 0; i < n; ++i) {
        CounterRng rng(a * 16 + b, StreamId(StreamTag::kTest, i));
        ++hits[RunEpisode(game, pi, rng)->terminal_state];
      }
      auto row = game.transition(0, 0, a, b);
      for (int s = 0; s < d.S; ++s) {
        const double p = row[s];
        ++entries;
        if (std::fabs(hits[s] / double(n) - p) <= 3 * std::sqrt(p * (1 - p) / n)) {
          ++within;
        }
      }
    }
  }
  EXPECT_GE(within, 0.99 * entries) << within << "/" << entries;
}

TEST(GameIoTest, LosslessRoundTrip) {
  GameDims d{3, 2, 3, 2, 1};
  auto game = testing::RandomGame(d, 21);
  auto back = GameFromJson(nlohmann::json::parse(GameToJson(game).dump()));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_TRUE(back->dims().SameGame(d));
  EXPECT_EQ(back->initial_state(), game.initial_state());
  ASSERT_EQ(back->rewards().size(), game.rewards().size());
  for (size_t i = 0; i < game.rewards().size(); ++i) {
    EXPECT_EQ(back->rewards()[i], game.rewards()[i]);
  }
  for (size_t i = 0; i < game.transitions().size(); ++i) {
    EXPECT_EQ(back->transitions()[i], game.transitions()[i]);
  }
}

TEST(GameIoTest, RejectsRaggedTables) {
  auto doc = GameToJson(testing::RandomGame({2, 2, 2, 1, 1}, 3));
  doc["rewards"][0][1][0].push_back(0.5);
  EXPECT_FALSE(GameFromJson(doc).ok());
}

}  // namespace
}  // namespace dpnash
