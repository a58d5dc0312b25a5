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

#include "dpnash/game_io.h"

#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "dpnash/io.h"

namespace dpnash {

using nlohmann::json;

namespace {

// Reads a nested array of the given shape into `out` in row-major order.
absl::Status Flatten(const json& node, std::span<const int> shape,
                     std::vector<double>* out, const std::string& name) {
  if (shape.empty()) {
    if (!node.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat(name, ": expected a number"));
    }
    out->push_back(node.get<double>());
    return absl::OkStatus();
  }
  if (!node.is_array() || node.size() != static_cast<size_t>(shape[0])) {
    return absl::InvalidArgumentError(absl::StrCat(
        name, ": expected an array of length ", shape[0]));
  }
  for (const json& child : node) {
    if (auto st = Flatten(child, shape.subspan(1), out, name); !st.ok()) {
      return st;
    }
  }
  return absl::OkStatus();
}

json Nest(std::span<const double> flat, std::span<const int> shape,
          size_t* pos) {
  if (shape.empty()) return flat[(*pos)++];
  json arr = json::array();
  for (int i = 0; i < shape[0]; ++i) arr.push_back(Nest(flat, shape.subspan(1), pos));
  return arr;
}

json Nest(std::span<const double> flat, std::vector<int> shape) {
  size_t pos = 0;
  return Nest(flat, shape, &pos);
}

absl::StatusOr<int> GetInt(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing or non-integer field '", key, "'"));
  }
  return obj[key].get<int>();
}

}  // namespace

json GameToJson(const MarkovGame& game) {
  const GameDims& d = game.dims();
  json doc;
  doc["dims"] = {{"S", d.S}, {"A", d.A}, {"B", d.B}, {"H", d.H}};
  doc["initial_state"] = game.initial_state();
  doc["rewards"] = Nest(game.rewards(), {d.H, d.S, d.A, d.B});
  doc["transitions"] = Nest(game.transitions(), {d.H, d.S, d.A, d.B, d.S});
  return doc;
}

absl::StatusOr<MarkovGame> GameFromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("dims") || !doc["dims"].is_object()) {
    return absl::InvalidArgumentError("game document needs a 'dims' object");
  }
  GameDims d;
  const json& dj = doc["dims"];
  for (auto [key, field] : {std::pair{"S", &d.S}, std::pair{"A", &d.A},
                            std::pair{"B", &d.B}, std::pair{"H", &d.H}}) {
    auto v = GetInt(dj, key);
    if (!v.ok()) return v.status();
    *field = *v;
  }
  if (!d.Valid()) return absl::InvalidArgumentError("dims must be positive");
  auto init = GetInt(doc, "initial_state");
  if (!init.ok()) return init.status();
  if (!doc.contains("rewards") || !doc.contains("transitions")) {
    return absl::InvalidArgumentError(
        "game document needs 'rewards' and 'transitions'");
  }
  std::vector<double> rewards, transitions;
  rewards.reserve(d.num_sab());
  transitions.reserve(d.num_sabs());
  const std::vector<int> r_shape = {d.H, d.S, d.A, d.B};
  const std::vector<int> p_shape = {d.H, d.S, d.A, d.B, d.S};
  if (auto st = Flatten(doc["rewards"], r_shape, &rewards, "rewards");
      !st.ok()) {
    return st;
  }
  if (auto st = Flatten(doc["transitions"], p_shape, &transitions,
                        "transitions");
      !st.ok()) {
    return st;
  }
  return MarkovGame::Create(d, std::move(rewards), std::move(transitions),
                            *init);
}

absl::Status SaveGame(const MarkovGame& game, const std::string& path) {
  return WriteFileAtomic(path, GameToJson(game).dump() + "\n");
}

absl::StatusOr<MarkovGame> LoadGame(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  json doc = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": malformed JSON"));
  }
  return GameFromJson(doc);
}

json MarginalsToJson(const MarginalPair& m) {
  json mu = json::array(), nu = json::array();
  for (int h = 0; h < m.H(); ++h) {
    json mu_h = json::array(), nu_h = json::array();
    for (int s = 0; s < m.S(); ++s) {
      auto a = m.mu(h, s);
      auto b = m.nu(h, s);
      mu_h.push_back(std::vector<double>(a.begin(), a.end()));
      nu_h.push_back(std::vector<double>(b.begin(), b.end()));
    }
    mu.push_back(std::move(mu_h));
    nu.push_back(std::move(nu_h));
  }
  return {{"mu", std::move(mu)}, {"nu", std::move(nu)}};
}

absl::StatusOr<MarginalPair> MarginalsFromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("mu") || !doc.contains("nu") ||
      !doc["mu"].is_array() || doc["mu"].empty() || !doc["mu"][0].is_array() ||
      doc["mu"][0].empty() || !doc["mu"][0][0].is_array() ||
      !doc["nu"].is_array() || doc["nu"].empty() || !doc["nu"][0].is_array() ||
      doc["nu"][0].empty() || !doc["nu"][0][0].is_array()) {
    return absl::InvalidArgumentError(
        "policy document needs nested 'mu' [H][S][A] and 'nu' [H][S][B]");
  }
  GameDims d;
  d.H = static_cast<int>(doc["mu"].size());
  d.S = static_cast<int>(doc["mu"][0].size());
  d.A = static_cast<int>(doc["mu"][0][0].size());
  d.B = static_cast<int>(doc["nu"][0][0].size());
  if (!d.Valid()) return absl::InvalidArgumentError("empty policy tables");
  std::vector<double> mu, nu;
  const std::vector<int> mu_shape = {d.H, d.S, d.A};
  const std::vector<int> nu_shape = {d.H, d.S, d.B};
  if (auto st = Flatten(doc["mu"], mu_shape, &mu, "mu"); !st.ok()) return st;
  if (auto st = Flatten(doc["nu"], nu_shape, &nu, "nu"); !st.ok()) return st;
  MarginalPair m(d);
  for (int h = 0; h < d.H; ++h) {
    for (int s = 0; s < d.S; ++s) {
      auto dst_mu = m.mu(h, s);
      auto dst_nu = m.nu(h, s);
      for (int a = 0; a < d.A; ++a) dst_mu[a] = mu[d.hs(h, s) * d.A + a];
      for (int b = 0; b < d.B; ++b) dst_nu[b] = nu[d.hs(h, s) * d.B + b];
    }
  }
  if (!m.Valid()) {
    return absl::InvalidArgumentError(
        "policy rows must be distributions (nonnegative, sum 1)");
  }
  return m;
}

json JointPolicyToJson(const JointPolicy& pi) {
  return {{"pi", Nest(pi.data(), {pi.H(), pi.S(), pi.A(), pi.B()})}};
}

}  // namespace dpnash
