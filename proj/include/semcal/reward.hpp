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

#ifndef SEMCAL_REWARD_HPP_
#define SEMCAL_REWARD_HPP_

// Correctness reward, semantic calibration reward, the curriculum-weighted
// combination r_csr = r_rlvr + lambda(t) * r_calibration, and group-relative
// advantages.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "semcal/judge.hpp"

namespace semcal {

enum class ScheduleKind { kConstant, kLinear, kSigmoid };
enum class CalibrationMode { kPairwise, kEmpirical };

ScheduleKind parse_schedule_kind(std::string_view name);
std::string_view to_string(ScheduleKind kind);
CalibrationMode parse_calibration_mode(std::string_view name);
std::string_view to_string(CalibrationMode mode);

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::kLinear;
  double lambda_min = 0.1;
  double lambda_max = 0.2;
  std::int64_t total_steps = 1;  // T
  double slope = 10.0;           // sigmoid only

  void validate() const;
};

struct RewardConfig {
  CalibrationMode calibration_mode = CalibrationMode::kPairwise;
  double epsilon = 1e-4;
  ScheduleConfig schedule;
  double advantage_std_floor = 1e-8;

  void validate() const;
};

struct RewardBreakdown {
  std::vector<Label> r_rlvr;
  std::vector<double> r_calibration;
  double lambda_t = 0.0;
  std::vector<double> r_csr;
  std::vector<double> advantages;

  bool operator==(const RewardBreakdown&) const = default;
};

// y, verbatim.
std::vector<Label> correctness_reward(const PairwiseAgreement& agreement);

// Binary cross-entropy CE(a, b) with `a` clamped to [epsilon, 1 - epsilon].
double smoothed_ce(double a, Label b, double epsilon);

// r[j] = -(1/(K-1)) sum_{i != j} CE(labels[j][i], y[j]). Needs K >= 2.
std::vector<double> calibration_reward_pairwise(const PairwiseAgreement& agreement,
                                                double epsilon);

// Mean-field form: with p_j the fraction of the other rollouts agreeing with
// j, r[j] = y log p_j + (1 - y) log(1 - p_j), clamped. Needs K >= 2.
std::vector<double> calibration_reward_empirical(
    const PairwiseAgreement& agreement, double epsilon);

std::vector<double> calibration_reward(const PairwiseAgreement& agreement,
                                       CalibrationMode mode, double epsilon);

// lambda(t) for 0 <= t <= T; throws RangeError outside.
double schedule_lambda(const ScheduleConfig& cfg, std::int64_t t);

// (r - mean) / max(population std, std_floor); exactly zero when every
// reward is equal.
std::vector<double> grpo_advantages(std::span<const double> rewards,
                                    double std_floor = 1e-8);

RewardBreakdown csr_reward(const PairwiseAgreement& agreement,
                           const RewardConfig& cfg, std::int64_t t);

}  // namespace semcal

#endif  // SEMCAL_REWARD_HPP_
