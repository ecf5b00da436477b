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

#include <string>
#include <vector>

#include "semcal/error.hpp"
#include "semcal/judge.hpp"
#include "test_util.hpp"

namespace semcal {
namespace {

using testing::make_group;

// Counts pairs so tests can check batching.
class CountingJudge : public Judge {
 public:
  explicit CountingJudge(double tau) : inner_(tau) {}
  std::vector<Label> judge(std::span<const TextPair> pairs) override {
    ++calls;
    pairs_seen += pairs.size();
    return inner_.judge(pairs);
  }
  int calls = 0;
  std::size_t pairs_seen = 0;

 private:
  F1Judge inner_;
};

TEST(F1Score, HandDerived) {
  EXPECT_DOUBLE_EQ(f1_score("James II", "James II"), 1.0);
  // overlap 2, sizes 2 and 4: 2*2/(2+4)
  EXPECT_NEAR(f1_score("James II", "James II of England"), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(f1_score("red", "blue"), 0.0);
}

TEST(F1Score, EmptyConventions) {
  EXPECT_DOUBLE_EQ(f1_score("", ""), 1.0);
  EXPECT_DOUBLE_EQ(f1_score("the", "a"), 1.0);  // both normalize to empty
  EXPECT_DOUBLE_EQ(f1_score("", "x"), 0.0);
  EXPECT_DOUBLE_EQ(f1_score("x", "the"), 0.0);
}

TEST(F1Score, CountsMultisets) {
  // tokens {a,a,b} vs {a,b,b} after article removal -> use non-articles
  // {x,x,y} vs {x,y,y}: overlap min(2,1)+min(1,2)=2, P=R=2/3
  EXPECT_NEAR(f1_score("x x y", "x y y"), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f1_score("x x", "x"), 2.0 * 0.5 * 1.0 / 1.5, 1e-15);
}

TEST(F1Score, Symmetric) {
  const std::vector<std::string> s{"James II", "james ii of england", "",
                                   "x y z", "The red car", "car red"};
  for (const auto& a : s) {
    for (const auto& b : s) EXPECT_EQ(f1_score(a, b), f1_score(b, a));
  }
}

TEST(F1Judge, ThresholdIsInclusive) {
  EXPECT_EQ(f1_judge("James II", "James II of England", 0.55), 1);
  EXPECT_EQ(f1_judge("James II", "James II of England", 0.70), 0);
  EXPECT_EQ(f1_judge("James II", "James II of England", 2.0 / 3.0), 1);
  for (double tau : {0.01, 0.5, 1.0}) EXPECT_EQ(f1_judge("s t", "s t", tau), 1);
}

TEST(F1Judge, RejectsBadTau) {
  EXPECT_THROW(f1_judge("a", "b", 0.0), ConfigError);
  EXPECT_THROW(f1_judge("a", "b", 1.5), ConfigError);
  EXPECT_THROW(F1Judge(-1.0), ConfigError);
}

TEST(JudgeConfig, Validate) {
  JudgeConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.kind = JudgeConfig::Kind::kExternal;
  EXPECT_THROW(cfg.validate(), ConfigError);  // no endpoint
  cfg.endpoint = "http://127.0.0.1:1";
  EXPECT_NO_THROW(cfg.validate());
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Correctness, GoldSet) {
  F1Judge judge(0.55);
  const std::vector<std::string> one{"Paris"};
  const std::vector<std::string> three{"Lyon", "Paris", "Nice"};
  EXPECT_EQ(correctness("Paris", one, judge), 1);
  EXPECT_EQ(correctness("paris.", three, judge), 1);
  F1Judge strict(0.75);
  EXPECT_EQ(correctness("James II", std::vector<std::string>{"James II of England"},
                        strict),
            0);
}

TEST(PairwiseMatrix, AllIdentical) {
  F1Judge judge(0.55);
  const auto a = pairwise_matrix(make_group("q", {"x"}, {"x", "x", "x"}), judge);
  EXPECT_EQ(a.labels, std::vector<Label>(9, 1));
  EXPECT_EQ(a.correctness, (std::vector<Label>{1, 1, 1}));
}

TEST(PairwiseMatrix, DisjointOneCorrect) {
  F1Judge judge(0.55);
  const auto a =
      pairwise_matrix(make_group("q", {"paris"}, {"Paris", "Berlin"}), judge);
  EXPECT_EQ(a.labels, (std::vector<Label>{1, 0, 0, 1}));
  EXPECT_EQ(a.correctness, (std::vector<Label>{1, 0}));
}

TEST(PairwiseMatrix, SingleRollout) {
  F1Judge judge(0.55);
  const auto a = pairwise_matrix(make_group("q", {"a"}, {"zzz"}), judge);
  EXPECT_EQ(a.k, 1u);
  EXPECT_EQ(a.labels, std::vector<Label>{1});
  EXPECT_EQ(a.correctness, std::vector<Label>{0});
}

TEST(PairwiseMatrix, DiagonalNeverJudgedAndBatched) {
  CountingJudge judge(0.55);
  const auto a = pairwise_matrix(
      make_group("q", {"g1", "g2"}, {"a", "b", "c", "d", "e"}), judge);
  EXPECT_EQ(judge.calls, 2);
  EXPECT_EQ(judge.pairs_seen, 10u + 5u * 2u);  // upper triangle + gold pairs
  EXPECT_NO_THROW(a.validate());
}

TEST(PairwiseAgreement, ValidateCatchesAsymmetry) {
  PairwiseAgreement a(3);
  a.labels[0 * 3 + 1] = 1;
  EXPECT_THROW(a.validate(), InvariantError);
  PairwiseAgreement b(2);
  b.labels[0] = 0;
  EXPECT_THROW(b.validate(), InvariantError);
}

}  // namespace
}  // namespace semcal
