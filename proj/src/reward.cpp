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

#include "semcal/reward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semcal/error.hpp"

namespace semcal {
namespace {

double clamp_prob(double a, double epsilon) {
  return std::clamp(a, epsilon, 1.0 - epsilon);
}

void require_group(const PairwiseAgreement& agreement) {
  agreement.validate();
  if (agreement.k < 2) {
    throw GroupTooSmallError("calibration reward needs K >= 2, got K=" +
                             std::to_string(agreement.k));
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ConfigError("epsilon must lie in (0, 0.5)");
  }
}

}  // namespace

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return ScheduleKind::kConstant;
  if (name == "linear") return ScheduleKind::kLinear;
  if (name == "sigmoid") return ScheduleKind::kSigmoid;
  throw ConfigError("unknown schedule '" + std::string(name) + "'");
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kConstant: return "constant";
    case ScheduleKind::kLinear: return "linear";
    case ScheduleKind::kSigmoid: return "sigmoid";
  }
  return "?";
}

CalibrationMode parse_calibration_mode(std::string_view name) {
  if (name == "pairwise") return CalibrationMode::kPairwise;
  if (name == "empirical") return CalibrationMode::kEmpirical;
  throw ConfigError("unknown calibration mode '" + std::string(name) + "'");
}

std::string_view to_string(CalibrationMode mode) {
  return mode == CalibrationMode::kPairwise ? "pairwise" : "empirical";
}

void ScheduleConfig::validate() const {
  if (!(lambda_min >= 0.0)) throw ConfigError("lambda_min must be >= 0");
  if (!(lambda_max >= lambda_min)) {
    throw ConfigError("lambda_max must be >= lambda_min");
  }
  if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (kind == ScheduleKind::kSigmoid && !(slope > 0.0)) {
    throw ConfigError("sigmoid slope must be > 0");
  }
}

void RewardConfig::validate() const {
  check_epsilon(epsilon);
  schedule.validate();
  if (!(advantage_std_floor > 0.0)) {
    throw ConfigError("advantage std floor must be > 0");
  }
}

std::vector<Label> correctness_reward(const PairwiseAgreement& agreement) {
  return agreement.correctness;
}

double smoothed_ce(double a, Label b, double epsilon) {
  const double p = clamp_prob(a, epsilon);
  return b ? -std::log(p) : -std::log1p(-p);
}

std::vector<double> calibration_reward_pairwise(
    const PairwiseAgreement& agreement, double epsilon) {
  check_epsilon(epsilon);
  require_group(agreement);
  const std::size_t k = agreement.k;
  std::vector<double> r(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Label y = agreement.correctness[j];
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != j) sum += smoothed_ce(agreement.at(j, i), y, epsilon);
    }
    r[j] = -sum / static_cast<double>(k - 1);
  }
  return r;
}

std::vector<double> calibration_reward_empirical(
    const PairwiseAgreement& agreement, double epsilon) {
  check_epsilon(epsilon);
  require_group(agreement);
  const std::size_t k = agreement.k;
  std::vector<double> r(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != j) agree += agreement.at(j, i);
    }
    const double p_hat = static_cast<double>(agree) / static_cast<double>(k - 1);
    r[j] = -smoothed_ce(p_hat, agreement.correctness[j], epsilon);
  }
  return r;
}

std::vector<double> calibration_reward(const PairwiseAgreement& agreement,
                                       CalibrationMode mode, double epsilon) {
  return mode == CalibrationMode::kPairwise
             ? calibration_reward_pairwise(agreement, epsilon)
             : calibration_reward_empirical(agreement, epsilon);
}

double schedule_lambda(const ScheduleConfig& cfg, std::int64_t t) {
  cfg.validate();
  if (t < 0 || t > cfg.total_steps) {
    throw RangeError("step " + std::to_string(t) + " outside [0, " +
                     std::to_string(cfg.total_steps) + "]");
  }
  const double span = cfg.lambda_max - cfg.lambda_min;
  const double frac =
      static_cast<double>(t) / static_cast<double>(cfg.total_steps);
  switch (cfg.kind) {
    case ScheduleKind::kConstant:
      return cfg.lambda_min;
    case ScheduleKind::kLinear:
      return cfg.lambda_min + span * frac;
    case ScheduleKind::kSigmoid:
      return cfg.lambda_min +
             span / (1.0 + std::exp(-cfg.slope * (frac - 0.5)));
  }
  return cfg.lambda_min;
}

std::vector<double> grpo_advantages(std::span<const double> rewards,
                                    double std_floor) {
  std::vector<double> adv(rewards.size(), 0.0);
  if (rewards.empty()) return adv;
  if (std::all_of(rewards.begin(), rewards.end(),
                  [&](double r) { return r == rewards.front(); })) {
    return adv;
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::max(std::sqrt(var / n), std_floor);
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    adv[j] = (rewards[j] - mean) / sd;
  }
  return adv;
}

RewardBreakdown csr_reward(const PairwiseAgreement& agreement,
                           const RewardConfig& cfg, std::int64_t t) {
  cfg.validate();
  RewardBreakdown out;
  out.r_rlvr = correctness_reward(agreement);
  out.r_calibration =
      calibration_reward(agreement, cfg.calibration_mode, cfg.epsilon);
  out.lambda_t = schedule_lambda(cfg.schedule, t);
  out.r_csr.resize(agreement.k);
  for (std::size_t j = 0; j < agreement.k; ++j) {
    out.r_csr[j] = static_cast<double>(out.r_rlvr[j]) +
                   out.lambda_t * out.r_calibration[j];
  }
  out.advantages = grpo_advantages(out.r_csr, cfg.advantage_std_floor);
  return out;
}

}  // namespace semcal
