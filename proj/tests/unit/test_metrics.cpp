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


#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "semcal/error.hpp"
#include "semcal/metrics.hpp"
#include "test_util.hpp"

namespace semcal {
namespace {

using testing::make_group;
namespace oracle = testing::oracle;

std::vector<CalibrationRecord> records_of(const std::vector<double>& conf,
                                          const std::vector<double>& acc) {
  std::vector<CalibrationRecord> out;
  for (std::size_t i = 0; i < conf.size(); ++i) {
    out.push_back({"q" + std::to_string(i), conf[i], acc[i], 0.0});
  }
  return out;
}

TEST(QuestionAccuracy, Fractions) {
  EXPECT_EQ(question_accuracy(std::vector<Label>{1, 1, 1, 1, 1, 1, 0, 0}), 0.75);
  EXPECT_EQ(question_accuracy(std::vector<Label>(5, 1)), 1.0);
  EXPECT_EQ(question_accuracy(std::vector<Label>(5, 0)), 0.0);
  EXPECT_THROW(question_accuracy(std::vector<Label>{}), ValidationError);
}

TEST(BinarizeAccuracy, InclusiveThreshold) {
  EXPECT_EQ(binarize_accuracy(0.5), 1);
  EXPECT_EQ(binarize_accuracy(0.49), 0);
  EXPECT_EQ(binarize_accuracy(1.0), 1);
}

TEST(Ece, HandDerived) {
  EXPECT_EQ(ece(records_of({0.3, 0.7}, {0.3, 0.7})), 0.0);
  EXPECT_NEAR(ece(records_of({0.9, 0.9}, {0.0, 1.0}), 10), 0.4, 1e-15);
  EXPECT_EQ(ece(records_of({1.0}, {0.0})), 1.0);
  EXPECT_THROW(ece(std::vector<CalibrationRecord>{}), ValidationError);
  EXPECT_THROW(ece(records_of({1.2}, {0.0})), ValidationError);
}

TEST(Ece, OneBinIsGlobalGap) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(1 + rng() % 50), a(c.size());
    double mc = 0.0, ma = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = u(rng);
      a[i] = u(rng);
      mc += c[i];
      ma += a[i];
    }
    mc /= static_cast<double>(c.size());
    ma /= static_cast<double>(c.size());
    EXPECT_NEAR(ece(records_of(c, a), 1), std::abs(ma - mc), 1e-12);
  }
}

TEST(Ece, OrderInvariantAndBounded) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto recs = records_of({}, {});
  for (int i = 0; i < 97; ++i) {
    recs.push_back({"q" + std::to_string(i), u(rng), static_cast<double>(rng() % 2), 0.0});
  }
  const double base = ece(recs, 10);
  EXPECT_GE(base, 0.0);
  EXPECT_LE(base, 1.0);
  for (int s = 0; s < 20; ++s) {
    std::shuffle(recs.begin(), recs.end(), rng);
    EXPECT_EQ(ece(recs, 10), base);
  }
}

TEST(ReliabilityBins, EdgesAndLastBinClosed) {
  const auto bins = reliability_bins(records_of({0.0, 0.1, 0.95, 1.0}, {0, 0, 1, 1}), 10);
  ASSERT_EQ(bins.size(), 10u);
  EXPECT_EQ(bins[0].count, 1u);
  EXPECT_EQ(bins[1].count, 1u);
  EXPECT_EQ(bins[9].count, 2u);
  EXPECT_DOUBLE_EQ(bins[9].hi, 1.0);
  EXPECT_EQ(bins[5].mean_conf, 0.0);
}

TEST(Auroc, HandDerived) {
  EXPECT_EQ(auroc(std::vector<double>{0.9, 0.1}, std::vector<Label>{1, 0}), 1.0);
  EXPECT_EQ(auroc(std::vector<double>{0.1, 0.9}, std::vector<Label>{1, 0}), 0.0);
  EXPECT_EQ(auroc(std::vector<double>{0.5, 0.5}, std::vector<Label>{1, 0}), 0.5);
  EXPECT_FALSE(auroc(std::vector<double>{0.2, 0.9}, std::vector<Label>{1, 1}));
}

TEST(Auroc, MatchesPairCountingWithTies) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 120;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 12) / 11.0;  // heavy ties
      y[i] = rng() % 2;
    }
    const std::vector<Label> labels(y.begin(), y.end());
    EXPECT_EQ(auroc(s, labels), oracle::auroc_pairs(s, y));
  }
}

TEST(Auroc, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(80), t(80);
  std::vector<Label> y(80);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    t[i] = std::exp(3.0 * s[i]) - 7.0;
    y[i] = rng() % 2;
  }
  EXPECT_EQ(auroc(s, y), auroc(t, y));
}

TEST(TokenCost, Sums) {
  EXPECT_EQ(token_cost(make_group("q", {"a"}, {"x"}, 100, 50)), 150.0);
  EXPECT_EQ(token_cost(make_group("q", {"a"}, std::vector<std::string>(8, "x"), 30, 20)),
            400.0);
  EXPECT_EQ(token_cost(make_group("q", {"a"}, {"x", "y"}, 0, 0)), 0.0);
}

TEST(Evaluate, IdenticalCorrectGroup) {
  F1Judge judge(0.55);
  const std::vector<RolloutGroup> groups{
      make_group("q", {"Paris"}, std::vector<std::string>(8, "Paris"))};
  const auto r = evaluate(groups, judge, {});
  EXPECT_EQ(r.num_questions, 1u);
  EXPECT_EQ(r.mean_accuracy, 1.0);
  EXPECT_EQ(r.records[0].confidence, 1.0);
  EXPECT_EQ(r.ece, 0.0);
  EXPECT_FALSE(r.auroc.has_value());
}

TEST(Evaluate, DistinctWrongAnswers) {
  F1Judge judge(0.55);
  const std::vector<RolloutGroup> groups{make_group(
      "q", {"Paris"}, {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"})};
  const auto r = evaluate(groups, judge, {});
  EXPECT_NEAR(r.records[0].confidence, 0.125, 1e-15);
  EXPECT_EQ(r.records[0].accuracy, 0.0);
  EXPECT_NEAR(r.ece, 0.125, 1e-15);
}

TEST(Evaluate, EmptyInputIsError) {
  F1Judge judge(0.55);
  EXPECT_THROW(evaluate(std::vector<RolloutGroup>{}, judge, {}), ValidationError);
}

TEST(Evaluate, FailFastOrSkip) {
  F1Judge judge(0.55);
  auto bad = make_group("bad", {}, {"x"});
  const std::vector<RolloutGroup> groups{make_group("ok", {"x"}, {"x", "y"}), bad};
  try {
    evaluate(groups, judge, {});
    FAIL() << "expected QuestionError";
  } catch (const QuestionError& e) {
    EXPECT_EQ(e.question_id(), "bad");
  }
  EvalConfig cfg;
  cfg.skip_errors = true;
  const auto r = evaluate(groups, judge, cfg);
  EXPECT_EQ(r.num_questions, 1u);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].question_id, "bad");
}

TEST(Evaluate, ReportIndependentOfGroupOrder) {
  F1Judge judge(0.55);
  std::vector<RolloutGroup> groups{
      make_group("b", {"x"}, {"x", "y", "x"}),
      make_group("a", {"z"}, {"z", "z", "z"}),
      make_group("c", {"w"}, {"p", "q", "r"})};
  const auto first = report_to_json(evaluate(groups, judge, {})).dump();
  std::reverse(groups.begin(), groups.end());
  EXPECT_EQ(report_to_json(evaluate(groups, judge, {})).dump(), first);
}

TEST(EvaluateVerbalized, FallbackAndJudging) {
  F1Judge judge(0.55);
  const std::vector<RolloutGroup> gold{make_group("a", {"Paris"}, {"x"}),
                                       make_group("b", {"Rome"}, {"x"})};
  const std::vector<VerbalizedRecord> recs{{"a", "paris", 0.8, true},
                                           {"b", "", std::nullopt, false}};
  const auto r = evaluate_verbalized(recs, gold, judge, {});
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].accuracy, 1.0);
  EXPECT_EQ(r.records[0].confidence, 0.8);
  EXPECT_EQ(r.records[1].accuracy, 0.0);
  EXPECT_EQ(r.records[1].confidence, 1.0);
}

TEST(ReportJson, NullsForEmptyBinsAndAuroc) {
  const auto r = summarize(records_of({0.05}, {1.0}), 10);
  const auto j = report_to_json(r);
  EXPECT_TRUE(j["auroc"].is_null());
  EXPECT_TRUE(j["bins"][3]["mean_conf"].is_null());
  EXPECT_EQ(j["bins"][0]["count"], 1);
  EXPECT_THAT(bins_to_csv(r), ::testing::StartsWith("lo,hi,count,mean_conf,mean_acc\n"));
}

}  // namespace
}  // namespace semcal
