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

#ifndef DPNASH_GAME_IO_H_
#define DPNASH_GAME_IO_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpnash/game.h"
#include "json.hpp"

namespace dpnash {

// Game document: {"dims": {S, A, B, H}, "initial_state", "rewards" [H][S][A][B],
// "transitions" [H][S][A][B][S]}. Doubles are written in shortest round-trip
// form so load(store(g)) reproduces every bit.
nlohmann::json GameToJson(const MarkovGame& game);
absl::StatusOr<MarkovGame> GameFromJson(const nlohmann::json& doc);

absl::Status SaveGame(const MarkovGame& game, const std::string& path);
absl::StatusOr<MarkovGame> LoadGame(const std::string& path);

// Policy pair document: {"mu": [H][S][A], "nu": [H][S][B]}.
nlohmann::json MarginalsToJson(const MarginalPair& m);
absl::StatusOr<MarginalPair> MarginalsFromJson(const nlohmann::json& doc);

// {"pi": [H][S][A][B]}
nlohmann::json JointPolicyToJson(const JointPolicy& pi);

}  // namespace dpnash

#endif  // DPNASH_GAME_IO_H_
