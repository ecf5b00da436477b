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

#include "semcal/lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semcal/error.hpp"
#include "semcal/metrics.hpp"
#include "semcal/semantics.hpp"

namespace semcal::lab {
namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kStepStream = 2;
constexpr std::uint64_t kEvalStream = 3;
constexpr std::uint64_t kBankStream = 4;

double clamped_log(double p, double epsilon) {
  return std::log(std::clamp(p, epsilon, 1.0 - epsilon));
}

void check_task_policy(const PolicyParams& policy, const SyntheticTask& task) {
  task.validate();
  policy.validate();
  if (policy.logits.size() != task.num_modes) {
    throw InvariantError("policy has " + std::to_string(policy.logits.size()) +
                         " logits for a task with " +
                         std::to_string(task.num_modes) + " modes");
  }
}

// Running mean and variance (Welford). Identical inputs give exactly zero
// variance.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  double std_error() const {
    if (n_ < 2) return 0.0;
    const double var = m2_ / static_cast<double>(n_ - 1);
    return std::sqrt(var / static_cast<double>(n_));
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void SyntheticTask::validate() const {
  if (num_modes < 2) throw InvariantError("a task needs at least two modes");
  if (correct_mode >= num_modes) {
    throw InvariantError("correct mode out of range");
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t m = 0; m < logits.size(); ++m) {
    p[m] = std::exp(logits[m] - top);
    z += p[m];
  }
  for (double& x : p) x /= z;
  return p;
}

std::vector<double> PolicyParams::probs() const { return softmax(logits); }

void PolicyParams::validate() const {
  if (logits.empty()) throw InvariantError("policy has no logits");
  for (double l : logits) {
    if (!std::isfinite(l)) throw InvariantError("policy logit is not finite");
  }
}

double exact_agreement(const PolicyParams& policy, std::size_t mode) {
  policy.validate();
  if (mode >= policy.logits.size()) throw InvariantError("mode out of range");
  return policy.probs()[mode];
}

double meanfield_surrogate(const PolicyParams& policy, const SyntheticTask& task,
                           double epsilon) {
  check_task_policy(policy, task);
  const auto pi = policy.probs();
  double total = 0.0;
  for (std::size_t m = 0; m < pi.size(); ++m) {
    const double term = m == task.correct_mode
                            ? clamped_log(pi[m], epsilon)
                            : clamped_log(1.0 - pi[m], epsilon);
    total += pi[m] * term;
  }
  return total;
}

double meanfield_surrogate(double alpha, double p, double epsilon) {
  return alpha * clamped_log(p, epsilon) +
         (1.0 - alpha) * clamped_log(1.0 - p, epsilon);
}

std::vector<std::size_t> sample_modes(const PolicyParams& policy, std::size_t k,
                                      Rng& rng) {
  const auto pi = policy.probs();
  std::vector<std::size_t> modes(k);
  for (auto& m : modes) m = rng.categorical(pi);
  return modes;
}

PairwiseAgreement oracle_agreement(std::span<const std::size_t> modes,
                                   std::size_t correct_mode) {
  PairwiseAgreement a(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    a.correctness[i] = modes[i] == correct_mode ? 1 : 0;
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      a.set(i, j, modes[i] == modes[j] ? 1 : 0);
    }
  }
  return a;
}

McEstimate mc_group_reward(const PolicyParams& policy, const SyntheticTask& task,
                           std::size_t k, std::size_t num_groups,
                           std::uint64_t seed, CalibrationMode mode,
                           double epsilon) {
  check_task_policy(policy, task);
  if (k < 2) throw GroupTooSmallError("Monte-Carlo groups need k >= 2");
  if (num_groups < 1) throw ConfigError("need at least one group");
  RunningStats stats;
  for (std::size_t g = 0; g < num_groups; ++g) {
    Rng rng(derive_seed(seed, g));
    const auto modes = sample_modes(policy, k, rng);
    const auto r =
        calibration_reward(oracle_agreement(modes, task.correct_mode), mode, epsilon);
    stats.add(mean_of(r));
  }
  return {stats.mean(), stats.std_error()};
}

std::vector<MeanFieldCheck> verify_meanfield(const PolicyParams& policy,
                                             const SyntheticTask& task,
                                             std::span<const std::size_t> k_list,
                                             std::size_t num_groups,
                                             std::uint64_t seed, double epsilon) {
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] < 2) throw ConfigError("every k must be >= 2");
    if (i > 0 && k_list[i] <= k_list[i - 1]) {
      throw ConfigError("k list must be strictly ascending");
    }
  }
  const double surrogate = meanfield_surrogate(policy, task, epsilon);
  const double alpha = exact_agreement(policy, task.correct_mode);
  std::vector<MeanFieldCheck> out;
  for (std::size_t k : k_list) {
    MeanFieldCheck c;
    c.k = k;
    c.num_groups = num_groups;
    c.alpha = alpha;
    c.surrogate = surrogate;
    const auto emp = mc_group_reward(policy, task, k, num_groups,
                                     derive_seed(seed, k), CalibrationMode::kEmpirical,
                                     epsilon);
    c.mc_estimate = emp.estimate;
    c.mc_stderr = emp.std_error;
    const auto pw = mc_group_reward(policy, task, k, num_groups,
                                    derive_seed(seed, k), CalibrationMode::kPairwise,
                                    epsilon);
    c.pairwise_estimate = pw.estimate;
    c.pairwise_stderr = pw.std_error;
    out.push_back(c);
  }
  return out;
}

bool gaps_non_increasing(std::span<const MeanFieldCheck> checks, double sigmas) {
  for (std::size_t i = 1; i < checks.size(); ++i) {
    const double slack =
        sigmas * std::hypot(checks[i].mc_stderr, checks[i - 1].mc_stderr);
    if (std::abs(checks[i].gap()) > std::abs(checks[i - 1].gap()) + slack) {
      return false;
    }
  }
  return true;
}

nlohmann::ordered_json check_to_json(const MeanFieldCheck& c) {
  nlohmann::ordered_json j;
  j["k"] = c.k;
  j["num_groups"] = c.num_groups;
  j["alpha"] = c.alpha;
  j["surrogate"] = c.surrogate;
  j["mc_estimate"] = c.mc_estimate;
  j["mc_stderr"] = c.mc_stderr;
  j["gap"] = c.gap();
  j["pairwise_estimate"] = c.pairwise_estimate;
  j["pairwise_stderr"] = c.pairwise_stderr;
  return j;
}

Objective parse_objective(std::string_view name) {
  if (name == "rlvr-only") return Objective::kRlvrOnly;
  if (name == "calibration-only") return Objective::kCalibrationOnly;
  if (name == "csr") return Objective::kCsr;
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::kRlvrOnly: return "rlvr-only";
    case Objective::kCalibrationOnly: return "calibration-only";
    case Objective::kCsr: return "csr";
  }
  return "?";
}

RewardBreakdown objective_rewards(const PairwiseAgreement& agreement,
                                  Objective objective, const RewardConfig& cfg,
                                  std::int64_t t) {
  if (objective == Objective::kCsr) return csr_reward(agreement, cfg, t);
  cfg.validate();
  RewardBreakdown out;
  out.r_rlvr = correctness_reward(agreement);
  out.r_calibration =
      calibration_reward(agreement, cfg.calibration_mode, cfg.epsilon);
  if (objective == Objective::kRlvrOnly) {
    out.lambda_t = 0.0;
    out.r_csr.assign(out.r_rlvr.begin(), out.r_rlvr.end());
  } else {
    out.lambda_t = 1.0;
    out.r_csr = out.r_calibration;
  }
  out.advantages = grpo_advantages(out.r_csr, cfg.advantage_std_floor);
  return out;
}

std::vector<double> score_function_gradient(const PolicyParams& policy,
                                            std::span<const std::size_t> modes,
                                            std::span<const double> weights) {
  if (modes.size() != weights.size()) {
    throw InvariantError("modes and weights differ in length");
  }
  const auto pi = policy.probs();
  // grad log pi(m) = e_m - pi.
  std::vector<double> grad(pi.size(), 0.0);
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    grad.at(modes[j]) += weights[j];
    weight_sum += weights[j];
  }
  for (std::size_t m = 0; m < pi.size(); ++m) grad[m] -= weight_sum * pi[m];
  return grad;
}

double frozen_batch_objective(const PolicyParams& theta, const PolicyParams& ref,
                              std::span<const std::size_t> modes,
                              std::span<const double> weights) {
  const auto p = theta.probs();
  const auto q = ref.probs();
  double total = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    total += weights[j] * p.at(modes[j]) / q.at(modes[j]);
  }
  return total;
}

PolicyParams reinforce_update(const PolicyParams& policy,
                              const SyntheticTask& task,
                              std::span<const std::size_t> modes,
                              Objective objective, const RewardConfig& cfg,
                              std::int64_t t, double learning_rate) {
  check_task_policy(policy, task);
  const auto breakdown = objective_rewards(
      oracle_agreement(modes, task.correct_mode), objective, cfg, t);
  const auto grad = score_function_gradient(policy, modes, breakdown.advantages);
  PolicyParams next = policy;
  for (std::size_t m = 0; m < grad.size(); ++m) {
    next.logits[m] += learning_rate * grad[m];
  }
  next.validate();
  return next;
}

PolicyParams reinforce_step(const PolicyParams& policy, const SyntheticTask& task,
                            std::size_t k, const RewardConfig& cfg,
                            std::int64_t t, double learning_rate,
                            std::uint64_t seed, Objective objective) {
  check_task_policy(policy, task);
  if (k < 2) throw GroupTooSmallError("reinforce_step needs k >= 2");
  Rng rng(derive_seed(seed, 0));
  const auto modes = sample_modes(policy, k, rng);
  return reinforce_update(policy, task, modes, objective, cfg, t, learning_rate);
}

TaskBank make_task_bank(const BankConfig& cfg) {
  if (cfg.num_tasks < 1) throw ConfigError("task bank must not be empty");
  if (cfg.num_modes < 2) throw ConfigError("tasks need at least two modes");
  TaskBank bank;
  for (std::size_t i = 0; i < cfg.num_tasks; ++i) {
    Rng rng(derive_seed(cfg.seed, kBankStream, i));
    SyntheticTask task;
    task.task_id = "task-" + std::to_string(i);
    task.num_modes = cfg.num_modes;
    task.correct_mode = rng.below(cfg.num_modes);
    PolicyParams policy;
    policy.logits.resize(cfg.num_modes);
    for (auto& l : policy.logits) l = cfg.logit_scale * rng.normal();
    policy.logits[task.correct_mode] +=
        cfg.correct_offset + cfg.correct_offset_spread * rng.normal();
    bank.tasks.push_back(std::move(task));
    bank.policies.push_back(std::move(policy));
  }
  return bank;
}

Checkpoint evaluate_bank(const TaskBank& bank, std::size_t eval_k,
                         std::size_t bins, std::uint64_t seed) {
  if (eval_k < 1) throw ConfigError("eval_k must be >= 1");
  Checkpoint c;
  std::vector<CalibrationRecord> records;
  records.reserve(bank.tasks.size());
  double alpha = 0.0, agreement = 0.0;
  for (std::size_t i = 0; i < bank.tasks.size(); ++i) {
    const auto& task = bank.tasks[i];
    const auto pi = bank.policies[i].probs();
    alpha += pi[task.correct_mode];
    for (double p : pi) agreement += p * p;

    Rng rng(derive_seed(seed, kEvalStream, i));
    const auto modes = sample_modes(bank.policies[i], eval_k, rng);
    const auto a = oracle_agreement(modes, task.correct_mode);
    const auto u = semantic_uncertainty(partition(a));
    CalibrationRecord r;
    r.question_id = task.task_id;
    r.confidence = u.confidence;
    r.accuracy = question_accuracy(a.correctness);
    records.push_back(std::move(r));
  }
  const auto n = static_cast<double>(bank.tasks.size());
  c.alpha = alpha / n;
  c.mean_agreement = agreement / n;
  c.ece = ece(records, bins);
  c.auroc = auroc(std::span<const CalibrationRecord>(records));
  return c;
}

TrainingTrace run_training(TaskBank bank, const TrainingConfig& cfg) {
  if (bank.tasks.empty() || bank.tasks.size() != bank.policies.size()) {
    throw ConfigError("task bank is empty or inconsistent");
  }
  if (cfg.steps < 0) throw ConfigError("steps must be >= 0");
  if (cfg.checkpoint_every < 1) throw ConfigError("checkpoint interval must be >= 1");
  if (cfg.tasks_per_step < 1) throw ConfigError("tasks per step must be >= 1");
  RewardConfig reward = cfg.reward;
  reward.schedule.total_steps = std::max<std::int64_t>(cfg.steps, 1);
  reward.validate();

  TrainingTrace trace;
  auto checkpoint = [&](std::int64_t step) {
    Checkpoint c = evaluate_bank(bank, cfg.eval_k, cfg.bins, cfg.seed);
    c.step = step;
    c.objective = cfg.objective;
    trace.checkpoints.push_back(c);
  };
  checkpoint(0);

  const std::size_t n = bank.tasks.size();
  std::vector<std::size_t> order(n);
  std::uint64_t visit = 0;  // position in the endless shuffled task stream
  for (std::int64_t s = 0; s < cfg.steps; ++s) {
    for (std::size_t slot = 0; slot < cfg.tasks_per_step; ++slot, ++visit) {
      const auto pos = static_cast<std::size_t>(visit % n);
      if (pos == 0) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, kShuffleStream, visit / n));
        for (std::size_t i = n; i > 1; --i) {
          std::swap(order[i - 1], order[rng.below(i)]);
        }
      }
      const std::size_t task = order[pos];
      bank.policies[task] = reinforce_step(
          bank.policies[task], bank.tasks[task], cfg.k, reward, s,
          cfg.learning_rate, derive_seed(cfg.seed, kStepStream, visit),
          cfg.objective);
    }
    if ((s + 1) % cfg.checkpoint_every == 0 || s + 1 == cfg.steps) {
      checkpoint(s + 1);
    }
  }
  trace.final_bank = std::move(bank);
  return trace;
}

nlohmann::ordered_json checkpoint_to_json(const Checkpoint& c) {
  nlohmann::ordered_json j;
  j["step"] = c.step;
  j["objective"] = std::string(to_string(c.objective));
  j["alpha"] = c.alpha;
  j["mean_agreement"] = c.mean_agreement;
  j["ece"] = c.ece;
  j["auroc"] = c.auroc ? nlohmann::ordered_json(*c.auroc)
                       : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace semcal::lab
