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

#ifndef DPNASH_HARNESS_H_
#define DPNASH_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpnash/game.h"
#include "dpnash/learner.h"
#include "json.hpp"

namespace dpnash {

struct GeneratorSpec {
  enum class Kind { kRandom, kChain };
  Kind kind = Kind::kRandom;
  GameDims dims;
  uint64_t seed = 1;
};

absl::StatusOr<GeneratorSpec::Kind> ParseGeneratorKind(const std::string& name);

// random: Dirichlet(1, ..., 1) transition rows and Uniform[0, 1) rewards.
// chain: from state s < S-1 only the pair (s mod A, s mod B) advances to
// s+1, every other pair falls back to state 0; state S-1 is absorbing and
// pays 1 for every pair, all other rewards are 0. Both start in state 0.
absl::StatusOr<MarkovGame> GenerateGame(const GeneratorSpec& spec);

struct ExperimentConfig {
  // Game source: a file when game_path is set, otherwise the generator.
  std::string game_path;
  GeneratorSpec generator;

  std::string privatizer = "none";
  double epsilon = 1.0;
  double beta = 0.05;
  double c1 = 1.0;
  double c2 = 2.0;
  int K = 1000;
  std::vector<uint64_t> seeds = {1};
  int eval_every = 1;
  std::string output_prefix = "run";
  int jobs = 1;
  int calibration_realizations = 200;
  uint64_t calibration_seed = 0x9e3779b97f4a7c15ULL;
  // Only settable programmatically or through --unsafe-zero-noise.
  bool zero_noise = false;

  absl::Status Validate() const;
};

// Reads the JSON config keys (same names as the fields; "generator" is an
// object {kind, S, A, B, H, seed}). Unknown keys and "zero_noise" are
// rejected. Fields missing from `doc` keep their values from `base`.
absl::StatusOr<ExperimentConfig> ConfigFromJson(const nlohmann::json& doc,
                                                ExperimentConfig base = {});
nlohmann::json ConfigToJson(const ExperimentConfig& cfg);

// CSV with header k,delta_gap,true_gap,cum_regret; rows at k divisible by
// eval_every plus the final episode.
std::string TraceCsv(const RunResult& result, int eval_every);

// Output policy, marginals and the resolved configuration.
nlohmann::json RunResultToJson(const RunResult& result,
                               const ExperimentConfig& cfg, uint64_t seed);

struct SeedOutcome {
  uint64_t seed = 0;
  absl::Status status;
  std::string trace_path;
  std::string result_path;
  std::string trace_sha256;
  std::string result_sha256;
};

struct ExperimentOutcome {
  std::vector<SeedOutcome> seeds;
  std::string manifest_path;
  double error_bound = 0.0;

  bool all_ok() const;
  // First failing seed's status, or OK.
  absl::Status status() const;
};

// Loads or generates the game, calibrates E once, runs every seed (up to
// `jobs` at a time) and writes <prefix>_seed<N>.csv, <prefix>_seed<N>.json
// and <prefix>_manifest.json, each atomically.
absl::StatusOr<ExperimentOutcome> RunExperiment(const ExperimentConfig& cfg);

// Loads the game named by cfg (file or generator).
absl::StatusOr<MarkovGame> ResolveGame(const ExperimentConfig& cfg);

// 0 ok, 1 validation, 2 I/O, 3 internal fault.
int ExitCodeFor(const absl::Status& status);

}  // namespace dpnash

#endif  // DPNASH_HARNESS_H_
