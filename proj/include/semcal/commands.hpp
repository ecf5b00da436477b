// Copyright 2026 The semcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMCAL_COMMANDS_HPP_
#define SEMCAL_COMMANDS_HPP_

// Entry points behind `semcal {eval|reward|simulate|verify-meanfield|serve}`.
// Each command renders its artifact to a string; the CLI decides where it
// goes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "semcal/judge.hpp"
#include "semcal/lab.hpp"
#include "semcal/metrics.hpp"
#include "semcal/reward.hpp"

namespace semcal {

enum class Command { kEval, kReward, kSimulate, kVerifyMeanfield, kServe };
enum class OutputFormat { kJson, kCsv, kPartitions };

struct RunConfig {
  Command command = Command::kEval;
  JudgeConfig judge;
  RewardConfig reward;
  // Horizon T; required by the reward command for non-constant schedules.
  std::optional<std::int64_t> total_steps;
  EvalConfig eval;

  std::string input;
  std::string verbalized;  // eval: score verbalized records against `input`
  std::string output;      // empty means stdout
  OutputFormat format = OutputFormat::kJson;
  std::uint64_t seed = 42;
  std::int64_t t = 0;

  // simulate
  lab::Objective objective = lab::Objective::kCsr;
  std::size_t tasks = 200;
  std::size_t modes = 8;
  std::int64_t steps = 2000;
  std::size_t k = 8;
  std::size_t tasks_per_step = lab::TrainingConfig{}.tasks_per_step;
  double learning_rate = lab::TrainingConfig{}.learning_rate;
  std::int64_t checkpoint_every = 100;

  // verify-meanfield
  std::vector<std::size_t> k_list{4, 16, 64, 256};
  std::size_t groups = 10000;
  std::size_t mf_modes = 2;  // uniform policy over this many modes

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
};

// Reward configuration with T resolved; throws ConfigError when a linear or
// sigmoid schedule has no horizon.
RewardConfig resolved_reward_config(const RunConfig& cfg);

nlohmann::ordered_json breakdown_to_json(const std::string& question_id,
                                         std::int64_t t,
                                         const RewardBreakdown& breakdown);

// Judges one group and scores it.
RewardBreakdown score_group(const RolloutGroup& group, Judge& judge,
                            const RewardConfig& cfg, std::int64_t t);

std::string run_eval(const RunConfig& cfg, const WarningSink& warn = {});
std::string run_reward(const RunConfig& cfg, const WarningSink& warn = {});
std::string run_simulate(const RunConfig& cfg);
std::string run_verify_meanfield(const RunConfig& cfg);

// Runs a non-serve command, writes the artifact to cfg.output (or `out`),
// reports failures on `err`. Returns the process exit status.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace semcal

#endif  // SEMCAL_COMMANDS_HPP_
