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

#ifndef SEMCAL_LAB_HPP_
#define SEMCAL_LAB_HPP_

// Synthetic-policy laboratory.
//
// Each task has M semantic modes, exactly one of them correct, and a
// categorical policy softmax(logits) over the modes. The judge is the mode
// identity: two rollouts agree iff they share a mode, and a rollout is
// correct iff its mode is the correct one. Under this oracle the agreement
// probability of a rollout with a fresh sample is the probability of its
// mode, so the mean-field quantities are available in closed form.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "semcal/reward.hpp"
#include "semcal/rng.hpp"

namespace semcal::lab {

struct SyntheticTask {
  std::string task_id;
  std::size_t num_modes = 2;
  std::size_t correct_mode = 0;

  void validate() const;
};

struct PolicyParams {
  std::vector<double> logits;

  std::vector<double> probs() const;
  // Throws InvariantError for non-finite logits.
  void validate() const;
};

std::vector<double> softmax(std::span<const double> logits);

// P(a fresh sample lands on `mode`) = softmax(logits)[mode].
double exact_agreement(const PolicyParams& policy, std::size_t mode);

// Exact expectation over modes of the mean-field calibration reward:
// sum_m pi(m) [y(m) log pi(m) + (1 - y(m)) log(1 - pi(m))], clamped to
// [epsilon, 1 - epsilon].
double meanfield_surrogate(const PolicyParams& policy, const SyntheticTask& task,
                           double epsilon = 1e-4);

// The same surrogate when every rollout shares one agreement probability p
// and a fraction alpha of rollouts is correct.
double meanfield_surrogate(double alpha, double p, double epsilon = 1e-4);

std::vector<std::size_t> sample_modes(const PolicyParams& policy, std::size_t k,
                                      Rng& rng);

// Agreement matrix and correctness vector under the oracle judge.
PairwiseAgreement oracle_agreement(std::span<const std::size_t> modes,
                                   std::size_t correct_mode);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Mean and standard error, over `num_groups` i.i.d. groups of k rollouts,
// of the group-averaged calibration reward. Group g draws from
// derive_seed(seed, g), so results do not depend on evaluation order.
McEstimate mc_group_reward(const PolicyParams& policy, const SyntheticTask& task,
                           std::size_t k, std::size_t num_groups,
                           std::uint64_t seed, CalibrationMode mode,
                           double epsilon = 1e-4);

struct MeanFieldCheck {
  std::size_t k = 0;
  std::size_t num_groups = 0;
  double alpha = 0.0;      // policy mass on the correct mode
  double surrogate = 0.0;
  double mc_estimate = 0.0;  // empirical mode
  double mc_stderr = 0.0;
  double pairwise_estimate = 0.0;  // reported for contrast only
  double pairwise_stderr = 0.0;

  double gap() const { return mc_estimate - surrogate; }
};

// Requires k_list ascending with every k >= 2.
std::vector<MeanFieldCheck> verify_meanfield(const PolicyParams& policy,
                                             const SyntheticTask& task,
                                             std::span<const std::size_t> k_list,
                                             std::size_t num_groups,
                                             std::uint64_t seed,
                                             double epsilon = 1e-4);

// True when each |gap| is at most the previous |gap| plus `sigmas` combined
// standard errors.
bool gaps_non_increasing(std::span<const MeanFieldCheck> checks,
                         double sigmas = 3.0);

nlohmann::ordered_json check_to_json(const MeanFieldCheck& check);

enum class Objective { kRlvrOnly, kCalibrationOnly, kCsr };

Objective parse_objective(std::string_view name);
std::string_view to_string(Objective objective);

// Per-rollout rewards of one group under `objective`; the breakdown's r_csr
// holds the objective's reward and advantages are computed from it.
RewardBreakdown objective_rewards(const PairwiseAgreement& agreement,
                                  Objective objective, const RewardConfig& cfg,
                                  std::int64_t t);

// sum_j weights[j] * grad log pi(modes[j]) with respect to the logits.
std::vector<double> score_function_gradient(const PolicyParams& policy,
                                            std::span<const std::size_t> modes,
                                            std::span<const double> weights);

// Frozen-batch surrogate sum_j weights[j] * pi_theta(m_j) / pi_ref(m_j).
// Its gradient at theta = ref equals score_function_gradient.
double frozen_batch_objective(const PolicyParams& theta, const PolicyParams& ref,
                              std::span<const std::size_t> modes,
                              std::span<const double> weights);

// One score-function update on an explicit group of modes.
PolicyParams reinforce_update(const PolicyParams& policy,
                              const SyntheticTask& task,
                              std::span<const std::size_t> modes,
                              Objective objective, const RewardConfig& cfg,
                              std::int64_t t, double learning_rate);

// Samples a group of k modes from derive_seed(seed, 0) and applies
// reinforce_update.
PolicyParams reinforce_step(const PolicyParams& policy, const SyntheticTask& task,
                            std::size_t k, const RewardConfig& cfg,
                            std::int64_t t, double learning_rate,
                            std::uint64_t seed,
                            Objective objective = Objective::kCsr);

struct BankConfig {
  std::size_t num_tasks = 200;
  std::size_t num_modes = 8;
  std::uint64_t seed = 42;
  double logit_scale = 1.5;            // stddev of the random logits
  double correct_offset = -0.75;       // mean shift of the correct logit
  double correct_offset_spread = 1.5;  // stddev of that shift across tasks
};

struct TaskBank {
  std::vector<SyntheticTask> tasks;
  std::vector<PolicyParams> policies;  // aligned with tasks
};

TaskBank make_task_bank(const BankConfig& cfg);

struct TrainingConfig {
  RewardConfig reward;
  Objective objective = Objective::kCsr;
  std::size_t k = 8;
  std::int64_t steps = 2000;
  std::size_t tasks_per_step = 20;
  double learning_rate = 0.1;
  std::uint64_t seed = 42;
  std::int64_t checkpoint_every = 100;
  std::size_t eval_k = 8;  // rollouts per task when scoring confidence
  std::size_t bins = 10;
};

struct Checkpoint {
  std::int64_t step = 0;
  Objective objective = Objective::kCsr;
  double alpha = 0.0;           // mean policy mass on correct modes
  double mean_agreement = 0.0;  // mean sum_m pi(m)^2
  double ece = 0.0;
  std::optional<double> auroc;
};

struct TrainingTrace {
  std::vector<Checkpoint> checkpoints;
  TaskBank final_bank;
};

// Scores a bank: exact alpha and agreement, plus ECE/AUROC of the
// exp(-entropy) confidence over eval_k sampled rollouts per task.
Checkpoint evaluate_bank(const TaskBank& bank, std::size_t eval_k,
                         std::size_t bins, std::uint64_t seed);

// Runs `steps` steps; each step updates the next `tasks_per_step` tasks of
// a stream that reshuffles the bank on every pass.
// The schedule horizon T is set to `steps`. Checkpoints at step 0, every
// `checkpoint_every` steps, and at the final step.
TrainingTrace run_training(TaskBank bank, const TrainingConfig& cfg);

nlohmann::ordered_json checkpoint_to_json(const Checkpoint& checkpoint);

}  // namespace semcal::lab

#endif  // SEMCAL_LAB_HPP_
