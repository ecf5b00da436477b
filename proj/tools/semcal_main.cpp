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

// semcal: semantic-calibration rewards and metrics from the command line.
//
//   semcal eval --input rollouts.jsonl [--judge f1 --tau 0.55] [--bins 10]
//   semcal reward --input rollouts.jsonl --t 0 --total-steps 1000
//   semcal simulate --objective csr --steps 2000
//   semcal verify-meanfield --k 4,16,64,256 --groups 10000
//   semcal serve --port 8080 --total-steps 1000

#include <csignal>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "semcal/commands.hpp"
#include "semcal/error.hpp"
#include "semcal/service.hpp"

namespace {

using semcal::RunConfig;

struct RawFlags {
  std::string judge = "f1";
  long long judge_timeout_ms = 10000;
  std::string calibration_mode = "pairwise";
  std::string schedule = "linear";
  std::string format = "json";
  std::string objective = "csr";
  std::string clustering = "greedy";
  std::int64_t total_steps = 0;
};

void add_judge_flags(CLI::App* app, RunConfig& cfg, RawFlags& raw) {
  app->add_option("--judge", raw.judge, "Equivalence judge")
      ->check(CLI::IsMember({"f1", "external"}))
      ->envname("SEMCAL_JUDGE");
  app->add_option("--tau", cfg.judge.tau, "Token-F1 threshold in (0, 1]")
      ->envname("SEMCAL_TAU");
  app->add_option("--judge-endpoint", cfg.judge.endpoint,
                  "Base URL of the entailment service")
      ->envname("SEMCAL_JUDGE_ENDPOINT");
  app->add_option("--judge-timeout-ms", raw.judge_timeout_ms)
      ->envname("SEMCAL_JUDGE_TIMEOUT_MS");
  app->add_option("--judge-retries", cfg.judge.max_retries)
      ->envname("SEMCAL_JUDGE_RETRIES");
  app->add_option("--judge-batch-size", cfg.judge.batch_size,
                  "Entailment queries per request");
}

void add_reward_flags(CLI::App* app, RunConfig& cfg, RawFlags& raw) {
  app->add_option("--calibration-mode", raw.calibration_mode)
      ->check(CLI::IsMember({"pairwise", "empirical"}));
  app->add_option("--epsilon", cfg.reward.epsilon, "Cross-entropy clamp");
  app->add_option("--schedule", raw.schedule)
      ->check(CLI::IsMember({"constant", "linear", "sigmoid"}));
  app->add_option("--lambda-min", cfg.reward.schedule.lambda_min);
  app->add_option("--lambda-max", cfg.reward.schedule.lambda_max);
  app->add_option("--total-steps", raw.total_steps, "Schedule horizon T");
  app->add_option("--sigmoid-slope", cfg.reward.schedule.slope);
}

void add_output_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--out", cfg.output, "Output path (default: stdout)");
  app->add_option("--seed", cfg.seed);
}

semcal::RewardService* g_service = nullptr;

void handle_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic calibration rewards, metrics and lab"};
  app.require_subcommand(1);

  RunConfig cfg;
  RawFlags raw;

  auto* eval = app.add_subcommand("eval", "Accuracy, ECE, AUROC and token cost");
  eval->add_option("--input", cfg.input, "Rollout JSONL")->required();
  eval->add_option("--verbalized", cfg.verbalized,
                   "Verbalized-confidence JSONL scored against --input golds");
  eval->add_option("--bins", cfg.eval.bins, "ECE bins");
  eval->add_option("--format", raw.format)
      ->check(CLI::IsMember({"json", "csv", "partitions"}));
  eval->add_option("--clustering", raw.clustering)
      ->check(CLI::IsMember({"greedy", "closure"}));
  eval->add_flag("--skip-errors", cfg.eval.skip_errors,
                 "Record failing questions instead of aborting");
  add_judge_flags(eval, cfg, raw);
  add_output_flags(eval, cfg);

  auto* reward = app.add_subcommand("reward", "Per-group CSR reward breakdowns");
  reward->add_option("--input", cfg.input, "Rollout JSONL")->required();
  reward->add_option("--t", cfg.t, "Training step");
  add_judge_flags(reward, cfg, raw);
  add_reward_flags(reward, cfg, raw);
  add_output_flags(reward, cfg);

  auto* simulate = app.add_subcommand("simulate", "Toy-policy training run");
  simulate->add_option("--objective", raw.objective)
      ->check(CLI::IsMember({"rlvr-only", "calibration-only", "csr"}));
  simulate->add_option("--tasks", cfg.tasks);
  simulate->add_option("--modes", cfg.modes);
  simulate->add_option("--steps", cfg.steps);
  simulate->add_option("--k", cfg.k, "Rollouts per group");
  simulate->add_option("--tasks-per-step", cfg.tasks_per_step);
  simulate->add_option("--lr", cfg.learning_rate);
  simulate->add_option("--checkpoint-every", cfg.checkpoint_every);
  simulate->add_option("--bins", cfg.eval.bins);
  add_reward_flags(simulate, cfg, raw);
  add_output_flags(simulate, cfg);

  auto* verify = app.add_subcommand("verify-meanfield",
                                    "Monte-Carlo check of the mean-field surrogate");
  verify->add_option("--k", cfg.k_list, "Group sizes, ascending")->delimiter(',');
  verify->add_option("--groups", cfg.groups, "Groups per k");
  verify->add_option("--modes", cfg.mf_modes, "Uniform policy over this many modes");
  verify->add_option("--epsilon", cfg.reward.epsilon);
  add_output_flags(verify, cfg);

  auto* serve = app.add_subcommand("serve", "Reward-scoring HTTP service");
  serve->add_option("--host", cfg.host);
  serve->add_option("--port", cfg.port);
  add_judge_flags(serve, cfg, raw);
  add_reward_flags(serve, cfg, raw);

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.judge.kind = raw.judge == "external" ? semcal::JudgeConfig::Kind::kExternal
                                             : semcal::JudgeConfig::Kind::kF1;
    cfg.judge.timeout = std::chrono::milliseconds(raw.judge_timeout_ms);
    cfg.reward.calibration_mode = semcal::parse_calibration_mode(raw.calibration_mode);
    cfg.reward.schedule.kind = semcal::parse_schedule_kind(raw.schedule);
    cfg.objective = semcal::lab::parse_objective(raw.objective);
    cfg.eval.clustering = raw.clustering == "closure"
                              ? semcal::ClusteringMethod::kClosure
                              : semcal::ClusteringMethod::kGreedy;
    cfg.format = raw.format == "csv"          ? semcal::OutputFormat::kCsv
                 : raw.format == "partitions" ? semcal::OutputFormat::kPartitions
                                              : semcal::OutputFormat::kJson;
    for (auto* sub : {reward, simulate, serve}) {
      if (sub->parsed() && sub->count("--total-steps") > 0) {
        cfg.total_steps = raw.total_steps;
      }
    }
  } catch (const semcal::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  if (eval->parsed()) cfg.command = semcal::Command::kEval;
  if (reward->parsed()) cfg.command = semcal::Command::kReward;
  if (simulate->parsed()) cfg.command = semcal::Command::kSimulate;
  if (verify->parsed()) cfg.command = semcal::Command::kVerifyMeanfield;

  if (serve->parsed()) {
    try {
      semcal::RewardService service(cfg);
      const int port = service.bind(cfg.host, cfg.port);
      if (port < 0) {
        std::cerr << "error: cannot bind " << cfg.host << ':' << cfg.port << '\n';
        return 1;
      }
      std::cerr << "listening on " << cfg.host << ':' << port << '\n';
      g_service = &service;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      const bool ok = service.listen();
      g_service = nullptr;
      return ok ? 0 : 1;
    } catch (const semcal::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }

  return semcal::run_command(cfg, std::cout, std::cerr);
}
