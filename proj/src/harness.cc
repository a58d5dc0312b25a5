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

#include "dpnash/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

#include "absl/strings/str_cat.h"
#include "dpnash/game_io.h"
#include "dpnash/io.h"

namespace dpnash {

using nlohmann::json;

absl::StatusOr<GeneratorSpec::Kind> ParseGeneratorKind(const std::string& name) {
  if (name == "random") return GeneratorSpec::Kind::kRandom;
  if (name == "chain") return GeneratorSpec::Kind::kChain;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown generator '", name, "' (random|chain)"));
}

namespace {

std::string GeneratorName(GeneratorSpec::Kind kind) {
  return kind == GeneratorSpec::Kind::kRandom ? "random" : "chain";
}

}  // namespace

absl::StatusOr<MarkovGame> GenerateGame(const GeneratorSpec& spec) {
  const GameDims& d = spec.dims;
  if (!d.Valid()) return absl::InvalidArgumentError("game dims must be >= 1");
  std::vector<double> rewards(d.num_sab(), 0.0);
  std::vector<double> transitions(d.num_sabs(), 0.0);
  if (spec.kind == GeneratorSpec::Kind::kRandom) {
    CounterRng rng(spec.seed, StreamId(StreamTag::kGameGenerator, 0));
    for (size_t c = 0; c < d.num_sab(); ++c) {
      rewards[c] = static_cast<double>(rng.NextU64() >> 11) * 0x1.0p-53;
      double total = 0.0;
      for (int n = 0; n < d.S; ++n) {
        const double e = rng.Exponential();
        transitions[c * d.S + n] = e;
        total += e;
      }
      for (int n = 0; n < d.S; ++n) transitions[c * d.S + n] /= total;
    }
  } else {
    for (int h = 0; h < d.H; ++h) {
      for (int s = 0; s < d.S; ++s) {
        for (int a = 0; a < d.A; ++a) {
          for (int b = 0; b < d.B; ++b) {
            const bool last = s == d.S - 1;
            const bool advance = a == s % d.A && b == s % d.B;
            const int next = last ? s : (advance ? s + 1 : 0);
            transitions[d.sabs(h, s, a, b, next)] = 1.0;
            rewards[d.sab(h, s, a, b)] = last ? 1.0 : 0.0;
          }
        }
      }
    }
  }
  return MarkovGame::Create(d, std::move(rewards), std::move(transitions), 0);
}

absl::Status ExperimentConfig::Validate() const {
  if (K < 1) return absl::InvalidArgumentError("K must be >= 1");
  if (eval_every < 1) return absl::InvalidArgumentError("eval_every must be >= 1");
  if (jobs < 1) return absl::InvalidArgumentError("jobs must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    return absl::InvalidArgumentError("C1 and C2 must be positive");
  }
  if (seeds.empty()) return absl::InvalidArgumentError("no seeds given");
  if (std::set<uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    return absl::InvalidArgumentError("seeds must be distinct");
  }
  if (calibration_realizations < 200) {
    return absl::InvalidArgumentError(
        "calibration needs at least 200 realizations");
  }
  if (output_prefix.empty()) {
    return absl::InvalidArgumentError("output prefix is empty");
  }
  if (game_path.empty() && !generator.dims.Valid()) {
    return absl::InvalidArgumentError("generator dims must be >= 1");
  }
  auto kind = ParsePrivatizerKind(privatizer, epsilon);
  return kind.status();
}

absl::StatusOr<ExperimentConfig> ConfigFromJson(const json& doc,
                                                ExperimentConfig cfg) {
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  static const std::set<std::string> kKnown = {
      "game_path", "generator", "privatizer", "epsilon", "beta",
      "c1", "c2", "K", "seeds", "eval_every", "output_prefix", "jobs",
      "calibration_realizations", "calibration_seed"};
  for (const auto& [key, value] : doc.items()) {
    if (key == "zero_noise" || key == "unsafe_zero_noise") {
      return absl::InvalidArgumentError(
          "zero-noise mode can only be enabled with --unsafe-zero-noise");
    }
    if (!kKnown.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  try {
    if (doc.contains("game_path")) cfg.game_path = doc["game_path"].get<std::string>();
    if (doc.contains("generator")) {
      const json& g = doc["generator"];
      if (g.contains("kind")) {
        auto kind = ParseGeneratorKind(g["kind"].get<std::string>());
        if (!kind.ok()) return kind.status();
        cfg.generator.kind = *kind;
      }
      if (g.contains("S")) cfg.generator.dims.S = g["S"].get<int>();
      if (g.contains("A")) cfg.generator.dims.A = g["A"].get<int>();
      if (g.contains("B")) cfg.generator.dims.B = g["B"].get<int>();
      if (g.contains("H")) cfg.generator.dims.H = g["H"].get<int>();
      if (g.contains("seed")) cfg.generator.seed = g["seed"].get<uint64_t>();
    }
    if (doc.contains("privatizer")) cfg.privatizer = doc["privatizer"].get<std::string>();
    if (doc.contains("epsilon")) cfg.epsilon = doc["epsilon"].get<double>();
    if (doc.contains("beta")) cfg.beta = doc["beta"].get<double>();
    if (doc.contains("c1")) cfg.c1 = doc["c1"].get<double>();
    if (doc.contains("c2")) cfg.c2 = doc["c2"].get<double>();
    if (doc.contains("K")) cfg.K = doc["K"].get<int>();
    if (doc.contains("seeds")) cfg.seeds = doc["seeds"].get<std::vector<uint64_t>>();
    if (doc.contains("eval_every")) cfg.eval_every = doc["eval_every"].get<int>();
    if (doc.contains("output_prefix")) {
      cfg.output_prefix = doc["output_prefix"].get<std::string>();
    }
    if (doc.contains("jobs")) cfg.jobs = doc["jobs"].get<int>();
    if (doc.contains("calibration_realizations")) {
      cfg.calibration_realizations = doc["calibration_realizations"].get<int>();
    }
    if (doc.contains("calibration_seed")) {
      cfg.calibration_seed = doc["calibration_seed"].get<uint64_t>();
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
  return cfg;
}

json ConfigToJson(const ExperimentConfig& cfg) {
  json doc;
  doc["game_path"] = cfg.game_path;
  doc["generator"] = {{"kind", GeneratorName(cfg.generator.kind)},
                      {"S", cfg.generator.dims.S},
                      {"A", cfg.generator.dims.A},
                      {"B", cfg.generator.dims.B},
                      {"H", cfg.generator.dims.H},
                      {"seed", cfg.generator.seed}};
  doc["privatizer"] = cfg.privatizer;
  doc["epsilon"] = cfg.epsilon;
  doc["beta"] = cfg.beta;
  doc["c1"] = cfg.c1;
  doc["c2"] = cfg.c2;
  doc["K"] = cfg.K;
  doc["seeds"] = cfg.seeds;
  doc["eval_every"] = cfg.eval_every;
  doc["output_prefix"] = cfg.output_prefix;
  doc["jobs"] = cfg.jobs;
  doc["calibration_realizations"] = cfg.calibration_realizations;
  doc["calibration_seed"] = cfg.calibration_seed;
  return doc;
}

namespace {

void AppendDouble(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string TraceCsv(const RunResult& result, int eval_every) {
  std::string out = "k,delta_gap,true_gap,cum_regret\n";
  const int K = static_cast<int>(result.per_episode.size());
  for (const EpisodeRecord& rec : result.per_episode) {
    if (rec.k % eval_every != 0 && rec.k != K) continue;
    absl::StrAppend(&out, rec.k, ",");
    AppendDouble(out, rec.delta_gap);
    out.push_back(',');
    AppendDouble(out, rec.true_gap);
    out.push_back(',');
    AppendDouble(out, rec.cum_regret);
    out.push_back('\n');
  }
  return out;
}

json RunResultToJson(const RunResult& result, const ExperimentConfig& cfg,
                     uint64_t seed) {
  json doc;
  json echo = ConfigToJson(cfg);
  echo["zero_noise"] = cfg.zero_noise;
  doc["config"] = std::move(echo);
  doc["resolved"] = {{"c1", result.config.c1},
                     {"c2", result.config.c2},
                     {"beta", result.config.beta},
                     {"iota", result.iota},
                     {"error_bound", result.error_bound},
                     {"privatizer", result.config.privatizer.Name()},
                     {"epsilon", result.config.privatizer.epsilon}};
  doc["seed"] = seed;
  doc["K"] = result.config.K;
  doc["output_episode"] = result.output_episode;
  if (!result.per_episode.empty()) {
    const EpisodeRecord& last = result.per_episode.back();
    doc["final"] = {{"delta_gap", last.delta_gap},
                    {"true_gap", last.true_gap},
                    {"cum_regret", last.cum_regret}};
  }
  doc["output_marginals"] = MarginalsToJson(result.output_marginals);
  doc["output_policy"] = JointPolicyToJson(result.output_policy);
  return doc;
}

bool ExperimentOutcome::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(),
                     [](const SeedOutcome& s) { return s.status.ok(); });
}

absl::Status ExperimentOutcome::status() const {
  for (const SeedOutcome& s : seeds) {
    if (!s.status.ok()) return s.status;
  }
  return absl::OkStatus();
}

absl::StatusOr<MarkovGame> ResolveGame(const ExperimentConfig& cfg) {
  absl::StatusOr<MarkovGame> game = cfg.game_path.empty()
                                        ? GenerateGame(cfg.generator)
                                        : LoadGame(cfg.game_path);
  if (!game.ok()) return game.status();
  if (auto v = ValidateGame(*game); !v.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid game (", v.size(), " violations), first: ",
                     v.front().check));
  }
  return game;
}

absl::StatusOr<ExperimentOutcome> RunExperiment(const ExperimentConfig& cfg) {
  if (auto st = cfg.Validate(); !st.ok()) return st;
  auto game = ResolveGame(cfg);
  if (!game.ok()) return game.status();
  auto kind = ParsePrivatizerKind(cfg.privatizer, cfg.epsilon);
  if (!kind.ok()) return kind.status();

  const std::filesystem::path prefix(cfg.output_prefix);
  if (prefix.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(prefix.parent_path(), ec);
    if (ec) {
      return absl::UnavailableError(absl::StrCat(
          "cannot create ", prefix.parent_path().string(), ": ", ec.message()));
    }
  }

  GameDims dims = game->dims();
  dims.K = cfg.K;
  LearnerConfig base;
  base.K = cfg.K;
  base.c1 = cfg.c1;
  base.c2 = cfg.c2;
  base.beta = cfg.beta;
  base.privatizer = *kind;
  base.zero_noise = cfg.zero_noise;
  Calibration cal;
  if (kind->type != PrivatizerKind::Type::kNone && !cfg.zero_noise) {
    auto c = CalibrateE(*kind, dims, cfg.beta,
                        CalibrationOptions{.realizations = cfg.calibration_realizations,
                                           .seed = cfg.calibration_seed});
    if (!c.ok()) return c.status();
    cal = *c;
  }
  base.error_bound = cal.E;

  ExperimentOutcome outcome;
  outcome.error_bound = cal.E;
  outcome.seeds.resize(cfg.seeds.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < cfg.seeds.size();
         i = next.fetch_add(1)) {
      SeedOutcome& out = outcome.seeds[i];
      out.seed = cfg.seeds[i];
      LearnerConfig lc = base;
      lc.seed = out.seed;
      auto result = Run(*game, lc);
      if (!result.ok()) {
        out.status = result.status();
        continue;
      }
      result->calibration = cal;
      const std::string stem = absl::StrCat(cfg.output_prefix, "_seed", out.seed);
      const std::string trace = TraceCsv(*result, cfg.eval_every);
      json doc = RunResultToJson(*result, cfg, out.seed);
      doc["calibration"] = {{"E", cal.E},
                            {"candidate", cal.candidate},
                            {"monte_carlo", cal.monte_carlo},
                            {"certified_frequency", cal.certified_frequency},
                            {"realizations", cal.realizations},
                            {"estimation_realizations", cal.estimation_realizations}};
      const std::string body = doc.dump(2) + "\n";
      out.trace_path = stem + ".csv";
      out.result_path = stem + ".json";
      out.trace_sha256 = Sha256Hex(trace);
      out.result_sha256 = Sha256Hex(body);
      if (auto st = WriteFileAtomic(out.trace_path, trace); !st.ok()) {
        out.status = st;
        continue;
      }
      out.status = WriteFileAtomic(out.result_path, body);
    }
  };
  const int workers = std::min<int>(cfg.jobs, static_cast<int>(cfg.seeds.size()));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  json manifest;
  manifest["config"] = ConfigToJson(cfg);
  manifest["config"]["zero_noise"] = cfg.zero_noise;
  manifest["error_bound"] = cal.E;
  manifest["runs"] = json::array();
  for (const SeedOutcome& s : outcome.seeds) {
    json entry = {{"seed", s.seed},
                  {"status", s.status.ok() ? "ok" : std::string(s.status.message())}};
    if (s.status.ok()) {
      entry["trace"] = {{"path", std::filesystem::path(s.trace_path).filename()},
                        {"sha256", s.trace_sha256}};
      entry["result"] = {{"path", std::filesystem::path(s.result_path).filename()},
                         {"sha256", s.result_sha256}};
    }
    manifest["runs"].push_back(std::move(entry));
  }
  outcome.manifest_path = cfg.output_prefix + "_manifest.json";
  if (auto st = WriteFileAtomic(outcome.manifest_path, manifest.dump(2) + "\n");
      !st.ok()) {
    return st;
  }
  return outcome;
}

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return 1;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kAlreadyExists:
      return 2;
    default:
      return 3;
  }
}

}  // namespace dpnash
