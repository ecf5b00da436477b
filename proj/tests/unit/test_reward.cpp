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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "semcal/error.hpp"
#include "semcal/reward.hpp"
#include "test_util.hpp"

namespace semcal {
namespace {

using testing::agreement_from;
using testing::agreement_from_ids;
namespace oracle = testing::oracle;

constexpr double kEps = 1e-4;

// Agreement matrix where rollout 0 has the given agreements with 1..3.
PairwiseAgreement row_zero(const std::vector<int>& agree, int y0) {
  std::vector<std::vector<int>> rows(4, std::vector<int>(4, 0));
  for (int i = 0; i < 4; ++i) rows[i][i] = 1;
  for (int i = 0; i < 3; ++i) rows[0][i + 1] = rows[i + 1][0] = agree[i];
  return agreement_from(rows, {y0, 0, 0, 0});
}

TEST(CorrectnessReward, IdentityOnY) {
  EXPECT_EQ(correctness_reward(agreement_from_ids({0, 1, 2}, {1, 0, 1})),
            (std::vector<Label>{1, 0, 1}));
  EXPECT_EQ(correctness_reward(agreement_from_ids({0}, {0})),
            std::vector<Label>{0});
}

TEST(SmoothedCe, HandDerived) {
  EXPECT_NEAR(smoothed_ce(1.0, 1, kEps), -std::log1p(-kEps), 1e-16);
  EXPECT_NEAR(smoothed_ce(1.0, 1, kEps), 1.0001e-4, 1e-8);
  EXPECT_NEAR(smoothed_ce(0.0, 1, kEps), std::log(1e4), 1e-12);
  EXPECT_NEAR(smoothed_ce(0.5, 0, kEps), std::log(2.0), 1e-15);
}

TEST(CalibrationPairwise, HandDerived) {
  EXPECT_NEAR(calibration_reward_pairwise(row_zero({1, 1, 1}, 1), kEps)[0],
              -1.0001e-4, 1e-8);
  // -(1/3)(2 * CE(1,1) + CE(0,1))
  const double want = -(2.0 * -std::log1p(-kEps) - std::log(kEps)) / 3.0;
  EXPECT_NEAR(calibration_reward_pairwise(row_zero({1, 1, 0}, 1), kEps)[0], want,
              1e-12);
  EXPECT_NEAR(want, -3.0702, 5e-5);
  EXPECT_NEAR(calibration_reward_pairwise(row_zero({0, 0, 0}, 0), kEps)[0],
              -1.0001e-4, 1e-8);
}

TEST(CalibrationPairwise, MatchesOracleOnRandomGroups) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 7;
    std::vector<std::vector<int>> rows(k, std::vector<int>(k, 1));
    std::vector<int> y(k);
    for (std::size_t i = 0; i < k; ++i) {
      y[i] = rng() % 2;
      for (std::size_t j = i + 1; j < k; ++j) rows[i][j] = rows[j][i] = rng() % 2;
    }
    const auto r = calibration_reward_pairwise(agreement_from(rows, y), kEps);
    for (std::size_t j = 0; j < k; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (i != j) sum += oracle::bce(rows[j][i], y[j], kEps);
      }
      EXPECT_NEAR(r[j], -sum / static_cast<double>(k - 1), 1e-12);
    }
  }
}

TEST(CalibrationEmpirical, HandDerived) {
  // K=4, rollout 0 correct and agreeing with 2 of 3 others: ln(2/3)
  EXPECT_NEAR(calibration_reward_empirical(row_zero({1, 1, 0}, 1), kEps)[0],
              std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(calibration_reward_empirical(row_zero({0, 0, 0}, 0), kEps)[0],
              std::log1p(-kEps), 1e-16);
  EXPECT_NEAR(calibration_reward_empirical(row_zero({1, 1, 1}, 1), kEps)[0],
              std::log1p(-kEps), 1e-16);
}

TEST(CalibrationReward, GroupTooSmall) {
  const auto one = agreement_from_ids({0}, {1});
  EXPECT_THROW(calibration_reward_pairwise(one, kEps), GroupTooSmallError);
  EXPECT_THROW(calibration_reward_empirical(one, kEps), GroupTooSmallError);
}

TEST(Schedule, LinearAndSigmoid) {
  ScheduleConfig cfg;
  cfg.total_steps = 100;
  EXPECT_DOUBLE_EQ(schedule_lambda(cfg, 0), 0.1);
  EXPECT_DOUBLE_EQ(schedule_lambda(cfg, 50), 0.15);
  EXPECT_DOUBLE_EQ(schedule_lambda(cfg, 100), 0.2);
  cfg.kind = ScheduleKind::kSigmoid;
  EXPECT_DOUBLE_EQ(schedule_lambda(cfg, 50), 0.15);
  cfg.kind = ScheduleKind::kConstant;
  EXPECT_DOUBLE_EQ(schedule_lambda(cfg, 77), 0.1);
}

TEST(Schedule, NonDecreasingAndBounded) {
  for (auto kind :
       {ScheduleKind::kConstant, ScheduleKind::kLinear, ScheduleKind::kSigmoid}) {
    ScheduleConfig cfg;
    cfg.kind = kind;
    cfg.total_steps = 37;
    double prev = -1.0;
    for (std::int64_t t = 0; t <= 37; ++t) {
      const double l = schedule_lambda(cfg, t);
      EXPECT_GE(l, prev);
      EXPECT_GE(l, cfg.lambda_min);
      EXPECT_LE(l, cfg.lambda_max);
      prev = l;
    }
    EXPECT_THROW(schedule_lambda(cfg, 38), RangeError);
    EXPECT_THROW(schedule_lambda(cfg, -1), RangeError);
  }
}

TEST(Schedule, ConfigValidation) {
  ScheduleConfig cfg;
  cfg.lambda_min = 0.3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.total_steps = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_EQ(parse_schedule_kind("sigmoid"), ScheduleKind::kSigmoid);
  EXPECT_THROW(parse_schedule_kind("cosine"), ConfigError);
  RewardConfig rc;
  rc.epsilon = 0.0;
  EXPECT_THROW(rc.validate(), ConfigError);
}

TEST(GrpoAdvantages, HandDerived) {
  EXPECT_EQ(grpo_advantages(std::vector<double>{1, 0, 1, 0}),
            (std::vector<double>{1, -1, 1, -1}));
  EXPECT_EQ(grpo_advantages(std::vector<double>{3, 3, 3, 3}),
            (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(grpo_advantages(std::vector<double>{2, 0}),
            (std::vector<double>{1, -1}));
}

TEST(GrpoAdvantages, FloorBoundsTinySpread) {
  const auto a = grpo_advantages(std::vector<double>{0.0, 1e-12}, 1e-8);
  EXPECT_NEAR(a[0], -0.5e-12 / 1e-8, 1e-15);
  EXPECT_NEAR(a[1], 0.5e-12 / 1e-8, 1e-15);
}

TEST(CsrReward, ComposedCases) {
  RewardConfig cfg;
  cfg.schedule.total_steps = 10;
  const auto agree_right = csr_reward(agreement_from_ids({0, 0, 0, 0}, {1, 1, 1, 1}), cfg, 0);
  for (double r : agree_right.r_csr) EXPECT_NEAR(r, 1.0 - 0.1 * 1.0001e-4, 1e-9);
  EXPECT_EQ(agree_right.advantages, std::vector<double>(4, 0.0));

  const auto spread_wrong = csr_reward(agreement_from_ids({0, 1, 2, 3}, {0, 0, 0, 0}), cfg, 0);
  for (double r : spread_wrong.r_csr) EXPECT_NEAR(r, -0.1 * 1.0001e-4, 1e-9);

  const auto agree_wrong = csr_reward(agreement_from_ids({0, 0, 0, 0}, {0, 0, 0, 0}), cfg, 0);
  for (double r : agree_wrong.r_csr) EXPECT_NEAR(r, -0.1 * std::log(1e4), 1e-9);
  EXPECT_NEAR(agree_wrong.r_csr[0], -0.92103, 1e-5);
  EXPECT_DOUBLE_EQ(agree_wrong.lambda_t, 0.1);
}

TEST(CsrReward, ComponentsAddUp) {
  std::mt19937_64 rng(5);
  RewardConfig cfg;
  cfg.schedule.total_steps = 50;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> ids(6), y(6);
    for (int i = 0; i < 6; ++i) {
      ids[i] = rng() % 3;
      y[i] = rng() % 2;
    }
    const std::int64_t t = rng() % 51;
    const auto b = csr_reward(agreement_from_ids(ids, y), cfg, t);
    const double mean =
        std::accumulate(b.advantages.begin(), b.advantages.end(), 0.0) / 6.0;
    EXPECT_NEAR(mean, 0.0, 1e-9);
    for (int j = 0; j < 6; ++j) {
      EXPECT_NEAR(b.r_csr[j], b.r_rlvr[j] + b.lambda_t * b.r_calibration[j], 1e-15);
    }
  }
}

}  // namespace
}  // namespace semcal
