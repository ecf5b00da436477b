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

#ifndef SEMCAL_JUDGE_HPP_
#define SEMCAL_JUDGE_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semcal/rollout.hpp"

namespace semcal {

using Label = std::uint8_t;

struct TextPair {
  std::string first;
  std::string second;
};

// Binary semantic-equivalence judge J(a, b). Implementations are symmetric
// in (a, b) and safe to call from several threads at once.
class Judge {
 public:
  virtual ~Judge() = default;

  // One label per pair, aligned with the input.
  virtual std::vector<Label> judge(std::span<const TextPair> pairs) = 0;

  Label operator()(std::string_view a, std::string_view b);
};

struct JudgeConfig {
  enum class Kind { kF1, kExternal };

  Kind kind = Kind::kF1;
  double tau = 0.55;
  std::string endpoint;               // external only, e.g. http://host:8080
  std::size_t batch_size = 64;        // entailment queries per request
  std::chrono::milliseconds timeout{10000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};

  // Throws ConfigError.
  void validate() const;
};

// Token-level F1 between the normalized token multisets of `a` and `b`.
// Both empty gives 1, exactly one empty gives 0.
double f1_score(std::string_view a, std::string_view b);

// 1 iff f1_score(a, b) >= tau. Requires 0 < tau <= 1.
Label f1_judge(std::string_view a, std::string_view b, double tau);

class F1Judge : public Judge {
 public:
  explicit F1Judge(double tau);

  std::vector<Label> judge(std::span<const TextPair> pairs) override;
  double tau() const { return tau_; }

 private:
  double tau_;
};

// Builds the judge described by `cfg` (F1 or HTTP-backed external).
std::unique_ptr<Judge> make_judge(const JudgeConfig& cfg);

// K x K symmetric judge labels with unit diagonal, plus the correctness
// vector y of each rollout against the gold answers.
struct PairwiseAgreement {
  std::size_t k = 0;
  std::vector<Label> labels;       // row-major, k * k
  std::vector<Label> correctness;  // length k

  PairwiseAgreement() = default;
  explicit PairwiseAgreement(std::size_t k);

  Label at(std::size_t i, std::size_t j) const { return labels[i * k + j]; }
  void set(std::size_t i, std::size_t j, Label v);  // writes both (i,j), (j,i)

  // Throws InvariantError unless symmetric with unit diagonal and binary
  // entries.
  void validate() const;

  bool operator==(const PairwiseAgreement&) const = default;
};

// 1 iff the judge deems `answer` equivalent to at least one gold answer.
Label correctness(std::string_view answer, std::span<const std::string> gold,
                  Judge& judge);

// Judges the upper triangle, mirrors it and fixes the diagonal to 1 without
// a judge call; fills y by judging every rollout against the gold set.
PairwiseAgreement pairwise_matrix(const RolloutGroup& group, Judge& judge);

}  // namespace semcal

#endif  // SEMCAL_JUDGE_HPP_
