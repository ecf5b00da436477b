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

#include "semcal/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "semcal/error.hpp"

namespace semcal {

RewardConfig resolved_reward_config(const RunConfig& cfg) {
  RewardConfig reward = cfg.reward;
  if (cfg.total_steps) {
    reward.schedule.total_steps = *cfg.total_steps;
  } else if (reward.schedule.kind != ScheduleKind::kConstant) {
    throw ConfigError("--total-steps is required for the " +
                      std::string(to_string(reward.schedule.kind)) +
                      " schedule");
  }
  reward.validate();
  return reward;
}

nlohmann::ordered_json breakdown_to_json(const std::string& question_id,
                                         std::int64_t t,
                                         const RewardBreakdown& b) {
  nlohmann::ordered_json j;
  j["question_id"] = question_id;
  j["t"] = t;
  j["lambda"] = b.lambda_t;
  nlohmann::ordered_json rewards;
  auto rlvr = nlohmann::ordered_json::array();
  for (Label l : b.r_rlvr) rlvr.push_back(static_cast<int>(l));
  rewards["rlvr"] = std::move(rlvr);
  rewards["calibration"] = b.r_calibration;
  rewards["csr"] = b.r_csr;
  j["rewards"] = std::move(rewards);
  j["advantages"] = b.advantages;
  return j;
}

RewardBreakdown score_group(const RolloutGroup& group, Judge& judge,
                            const RewardConfig& cfg, std::int64_t t) {
  validate_group(group);
  if (group.k() < 2) {
    throw GroupTooSmallError("calibration reward needs K >= 2, got K=1");
  }
  return csr_reward(pairwise_matrix(group, judge), cfg, t);
}

std::string run_eval(const RunConfig& cfg, const WarningSink& warn) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  const auto groups = parse_rollout_file(cfg.input, warn);
  auto judge = make_judge(cfg.judge);

  if (!cfg.verbalized.empty()) {
    const auto records = parse_verbalized_file(cfg.verbalized, warn);
    const auto report = evaluate_verbalized(records, groups, *judge, cfg.eval);
    if (cfg.format == OutputFormat::kCsv) return bins_to_csv(report);
    if (cfg.format == OutputFormat::kPartitions) {
      throw ConfigError("verbalized records have no partitions");
    }
    return report_to_json(report).dump(2) + "\n";
  }

  std::vector<QuestionEval> details;
  const auto report = evaluate(groups, *judge, cfg.eval, &details);
  switch (cfg.format) {
    case OutputFormat::kCsv:
      return bins_to_csv(report);
    case OutputFormat::kPartitions: {
      std::string out;
      for (const auto& q : details) {
        out += partition_to_json(q.record.question_id, q).dump() + "\n";
      }
      return out;
    }
    case OutputFormat::kJson:
      break;
  }
  return report_to_json(report).dump(2) + "\n";
}

std::string run_reward(const RunConfig& cfg, const WarningSink& warn) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  const RewardConfig reward = resolved_reward_config(cfg);
  if (cfg.t < 0 || cfg.t > reward.schedule.total_steps) {
    throw RangeError("--t must lie in [0, total steps]");
  }
  const auto groups = parse_rollout_file(cfg.input, warn);
  auto judge = make_judge(cfg.judge);
  std::string out;
  for (const auto& group : groups) {
    RewardBreakdown b;
    try {
      b = score_group(group, *judge, reward, cfg.t);
    } catch (const Error& e) {
      throw QuestionError(group.question_id, e.what());
    }
    out += breakdown_to_json(group.question_id, cfg.t, b).dump() + "\n";
  }
  return out;
}

std::string run_simulate(const RunConfig& cfg) {
  lab::BankConfig bank_cfg;
  bank_cfg.num_tasks = cfg.tasks;
  bank_cfg.num_modes = cfg.modes;
  bank_cfg.seed = cfg.seed;

  lab::TrainingConfig train;
  train.reward = cfg.reward;
  if (cfg.total_steps) train.reward.schedule.total_steps = *cfg.total_steps;
  train.objective = cfg.objective;
  train.k = cfg.k;
  train.tasks_per_step = cfg.tasks_per_step;
  train.steps = cfg.steps;
  train.learning_rate = cfg.learning_rate;
  train.seed = cfg.seed;
  train.checkpoint_every = cfg.checkpoint_every;
  train.bins = cfg.eval.bins;

  const auto trace = lab::run_training(lab::make_task_bank(bank_cfg), train);
  std::string out;
  for (const auto& c : trace.checkpoints) {
    out += lab::checkpoint_to_json(c).dump() + "\n";
  }
  return out;
}

std::string run_verify_meanfield(const RunConfig& cfg) {
  if (cfg.mf_modes < 2) throw ConfigError("--modes must be >= 2");
  lab::SyntheticTask task{"meanfield", cfg.mf_modes, 0};
  lab::PolicyParams policy{std::vector<double>(cfg.mf_modes, 0.0)};
  const auto checks = lab::verify_meanfield(policy, task, cfg.k_list, cfg.groups,
                                            cfg.seed, cfg.reward.epsilon);
  std::string out;
  for (const auto& c : checks) out += lab::check_to_json(c).dump() + "\n";
  return out;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const WarningSink warn = [&err](const std::string& msg) {
    err << "warning: " << msg << '\n';
  };
  std::string artifact;
  try {
    switch (cfg.command) {
      case Command::kEval: artifact = run_eval(cfg, warn); break;
      case Command::kReward: artifact = run_reward(cfg, warn); break;
      case Command::kSimulate: artifact = run_simulate(cfg); break;
      case Command::kVerifyMeanfield: artifact = run_verify_meanfield(cfg); break;
      case Command::kServe:
        throw ConfigError("serve is not a batch command");
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (cfg.output.empty()) {
    out << artifact;
    out.flush();
    return out ? 0 : 1;
  }
  std::ofstream file(cfg.output, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "error: cannot write '" << cfg.output << "'\n";
    return 1;
  }
  file << artifact;
  file.close();
  if (!file) {
    err << "error: failed writing '" << cfg.output << "'\n";
    return 1;
  }
  return 0;
}

}  // namespace semcal
