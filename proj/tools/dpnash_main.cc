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

// Command-line front end: run, gen, eval, certify-e.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnash/evaluation.h"
#include "dpnash/game_io.h"
#include "dpnash/harness.h"
#include "dpnash/io.h"
#include "dpnash/privacy.h"
#include "json.hpp"

namespace {

using dpnash::ExitCodeFor;
using nlohmann::json;

int Fail(const absl::Status& st) {
  std::cerr << "dpnash: " << st << "\n";
  return ExitCodeFor(st);
}

// Flag values; each is applied only when given on the command line.
struct RunFlags {
  std::string config_path;
  std::string game_path;
  std::string generator = "random";
  int S = 2, A = 2, B = 2, H = 2;
  uint64_t game_seed = 1;
  std::string privatizer;
  double epsilon = 1.0;
  double beta = 0.05;
  double c1 = 1.0;
  double c2 = 2.0;
  int K = 1000;
  std::vector<uint64_t> seeds;
  int eval_every = 1;
  std::string output_prefix;
  int jobs = 1;
  int calibration_realizations = 200;
  uint64_t calibration_seed = dpnash::CalibrationOptions{}.seed;
  bool unsafe_zero_noise = false;
};

void AddGeneratorFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--generator", f.generator, "random | chain");
  cmd->add_option("--S", f.S, "number of states");
  cmd->add_option("--A", f.A, "max-player actions");
  cmd->add_option("--B", f.B, "min-player actions");
  cmd->add_option("--H", f.H, "horizon");
  cmd->add_option("--game-seed", f.game_seed, "seed of the random generator");
}

absl::StatusOr<dpnash::ExperimentConfig> BuildConfig(CLI::App* cmd,
                                                      const RunFlags& f) {
  dpnash::ExperimentConfig cfg;
  if (!f.config_path.empty()) {
    auto text = dpnash::ReadFile(f.config_path);
    if (!text.ok()) return text.status();
    json doc = json::parse(*text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      return absl::InvalidArgumentError(
          absl::StrCat(f.config_path, ": malformed JSON"));
    }
    auto parsed = dpnash::ConfigFromJson(doc, cfg);
    if (!parsed.ok()) return parsed.status();
    cfg = *parsed;
  }
  auto given = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (given("--game")) cfg.game_path = f.game_path;
  if (given("--generator")) {
    auto kind = dpnash::ParseGeneratorKind(f.generator);
    if (!kind.ok()) return kind.status();
    cfg.generator.kind = *kind;
  }
  if (given("--S")) cfg.generator.dims.S = f.S;
  if (given("--A")) cfg.generator.dims.A = f.A;
  if (given("--B")) cfg.generator.dims.B = f.B;
  if (given("--H")) cfg.generator.dims.H = f.H;
  if (given("--game-seed")) cfg.generator.seed = f.game_seed;
  if (given("--privatizer")) cfg.privatizer = f.privatizer;
  if (given("--epsilon")) cfg.epsilon = f.epsilon;
  if (given("--beta")) cfg.beta = f.beta;
  if (given("--c1")) cfg.c1 = f.c1;
  if (given("--c2")) cfg.c2 = f.c2;
  if (given("--K")) cfg.K = f.K;
  if (given("--seeds")) cfg.seeds = f.seeds;
  if (given("--eval-every")) cfg.eval_every = f.eval_every;
  if (given("--output-prefix")) cfg.output_prefix = f.output_prefix;
  if (given("--jobs")) cfg.jobs = f.jobs;
  if (given("--calibration-realizations")) {
    cfg.calibration_realizations = f.calibration_realizations;
  }
  if (given("--calibration-seed")) cfg.calibration_seed = f.calibration_seed;
  cfg.zero_noise = f.unsafe_zero_noise;
  if (auto st = cfg.Validate(); !st.ok()) return st;
  return cfg;
}

int RunCommand(CLI::App* cmd, const RunFlags& f) {
  auto cfg = BuildConfig(cmd, f);
  if (!cfg.ok()) return Fail(cfg.status());
  if (cfg->zero_noise) {
    std::cerr << "dpnash: WARNING: --unsafe-zero-noise disables all privacy "
                 "noise; outputs are not private\n";
  }
  auto outcome = dpnash::RunExperiment(*cfg);
  if (!outcome.ok()) return Fail(outcome.status());
  for (const auto& s : outcome->seeds) {
    if (s.status.ok()) {
      std::cout << "seed " << s.seed << ": " << s.trace_path << "\n";
    } else {
      std::cerr << "seed " << s.seed << " failed: " << s.status << "\n";
    }
  }
  std::cout << "manifest: " << outcome->manifest_path << "\n";
  return outcome->all_ok() ? 0 : ExitCodeFor(outcome->status());
}

int GenCommand(const RunFlags& f, const std::string& out) {
  auto kind = dpnash::ParseGeneratorKind(f.generator);
  if (!kind.ok()) return Fail(kind.status());
  dpnash::GeneratorSpec spec{*kind, {f.S, f.A, f.B, f.H, 1}, f.game_seed};
  auto game = dpnash::GenerateGame(spec);
  if (!game.ok()) return Fail(game.status());
  if (auto st = dpnash::SaveGame(*game, out); !st.ok()) return Fail(st);
  std::cout << out << "\n";
  return 0;
}

int EvalCommand(const std::string& game_path, const std::string& policy_path) {
  auto game = dpnash::LoadGame(game_path);
  if (!game.ok()) return Fail(game.status());
  if (auto v = dpnash::ValidateGame(*game); !v.empty()) {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat("invalid game: ", v.front().check)));
  }
  auto text = dpnash::ReadFile(policy_path);
  if (!text.ok()) return Fail(text.status());
  json doc = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat(policy_path, ": malformed JSON")));
  }
  // Accept a bare {mu, nu} document or a run result.
  if (doc.is_object() && doc.contains("output_marginals")) {
    doc = doc["output_marginals"];
  }
  auto pair = dpnash::MarginalsFromJson(doc);
  if (!pair.ok()) return Fail(pair.status());
  if (!pair->Matches(game->dims())) {
    return Fail(absl::InvalidArgumentError("policy does not match the game"));
  }
  auto gap = dpnash::EvaluateGap(*game, *pair);
  if (!gap.ok()) return Fail(gap.status());
  auto nash = dpnash::NashValues(*game);
  if (!nash.ok()) return Fail(nash.status());
  json out = {{"br_max", gap->br_max},
              {"br_min", gap->br_min},
              {"gap", gap->gap},
              {"nash_value", nash->values.at(0, game->initial_state())}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int CertifyCommand(const RunFlags& f) {
  auto kind = dpnash::ParsePrivatizerKind(f.privatizer, f.epsilon);
  if (!kind.ok()) return Fail(kind.status());
  dpnash::GameDims dims{f.S, f.A, f.B, f.H, f.K};
  if (!dims.Valid()) return Fail(absl::InvalidArgumentError("dims must be >= 1"));
  dpnash::CalibrationOptions opts;
  opts.realizations = f.calibration_realizations;
  opts.seed = f.calibration_seed;
  auto cal = dpnash::CalibrateE(*kind, dims, f.beta, opts);
  if (!cal.ok()) return Fail(cal.status());
  json out = {{"E", cal->E},
              {"candidate", cal->candidate},
              {"monte_carlo", cal->monte_carlo},
              {"certified_frequency", cal->certified_frequency},
              {"required_frequency", 1.0 - f.beta / 3.0},
              {"realizations", cal->realizations},
              {"estimation_realizations", cal->estimation_realizations}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private Nash value iteration"};
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment");
  run_cmd->add_option("--config", run.config_path, "JSON config file");
  run_cmd->add_option("--game", run.game_path, "game file (else generator)");
  AddGeneratorFlags(run_cmd, run);
  run_cmd->add_option("--privatizer", run.privatizer, "none | central | local");
  run_cmd->add_option("--epsilon", run.epsilon, "privacy budget");
  run_cmd->add_option("--beta", run.beta, "failure probability");
  run_cmd->add_option("--c1", run.c1, "bonus constant C1");
  run_cmd->add_option("--c2", run.c2, "bonus constant C2");
  run_cmd->add_option("--K", run.K, "number of episodes");
  run_cmd->add_option("--seeds", run.seeds, "run seeds")->delimiter(',');
  run_cmd->add_option("--eval-every", run.eval_every, "trace thinning");
  run_cmd->add_option("--output-prefix", run.output_prefix, "output prefix");
  run_cmd->add_option("--jobs", run.jobs, "concurrent seeds");
  run_cmd->add_option("--calibration-realizations",
                      run.calibration_realizations, "certificate noise draws for E");
  run_cmd->add_option("--calibration-seed", run.calibration_seed,
                      "seed of the calibration draws");
  run_cmd->add_flag("--unsafe-zero-noise", run.unsafe_zero_noise,
                    "disable all privacy noise (testing only)");

  RunFlags gen;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write a generated game");
  AddGeneratorFlags(gen_cmd, gen);
  gen_cmd->add_option("--out", gen_out, "output game file")->required();

  std::string eval_game, eval_policy;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Nash gap of a stored policy");
  eval_cmd->add_option("--game", eval_game, "game file")->required();
  eval_cmd->add_option("--policy", eval_policy,
                       "{mu, nu} JSON or a run result")->required();

  RunFlags cert;
  cert.privatizer = "central";
  CLI::App* cert_cmd = app.add_subcommand("certify-e", "calibrate E");
  cert_cmd->add_option("--privatizer", cert.privatizer, "central | local");
  cert_cmd->add_option("--epsilon", cert.epsilon, "privacy budget");
  cert_cmd->add_option("--beta", cert.beta, "failure probability");
  cert_cmd->add_option("--S", cert.S, "number of states");
  cert_cmd->add_option("--A", cert.A, "max-player actions");
  cert_cmd->add_option("--B", cert.B, "min-player actions");
  cert_cmd->add_option("--H", cert.H, "horizon");
  cert_cmd->add_option("--K", cert.K, "number of episodes");
  cert_cmd->add_option("--realizations", cert.calibration_realizations,
                       "noise draws");
  cert_cmd->add_option("--seed", cert.calibration_seed, "calibration seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (*run_cmd) return RunCommand(run_cmd, run);
  if (*gen_cmd) return GenCommand(gen, gen_out);
  if (*eval_cmd) return EvalCommand(eval_game, eval_policy);
  if (*cert_cmd) return CertifyCommand(cert);
  return 1;
}
