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

#ifndef SEMCAL_METRICS_HPP_
#define SEMCAL_METRICS_HPP_

// Question-level accuracy, ECE, AUROC, token cost and reliability reports.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "semcal/error.hpp"
#include "semcal/judge.hpp"
#include "semcal/rollout.hpp"
#include "semcal/semantics.hpp"

namespace semcal {

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mean_conf = 0.0;  // 0 when count == 0
  double mean_acc = 0.0;

  bool operator==(const ReliabilityBin&) const = default;
};

struct RejectedQuestion {
  std::string question_id;
  std::string error;

  bool operator==(const RejectedQuestion&) const = default;
};

struct MetricsReport {
  std::size_t num_questions = 0;
  double mean_accuracy = 0.0;
  double ece = 0.0;
  std::optional<double> auroc;  // empty when all labels agree
  double mean_token_cost = 0.0;
  std::vector<ReliabilityBin> bins;
  std::vector<CalibrationRecord> records;  // sorted by question_id
  std::vector<RejectedQuestion> rejected;

  bool operator==(const MetricsReport&) const = default;
};

struct EvalConfig {
  std::size_t bins = 10;
  ClusteringMethod clustering = ClusteringMethod::kGreedy;
  bool skip_errors = false;
};

// Evaluation of one question failed; what() names the question.
class QuestionError : public Error {
 public:
  QuestionError(std::string question_id, const std::string& what)
      : Error("question '" + question_id + "': " + what),
        question_id_(std::move(question_id)) {}
  const std::string& question_id() const { return question_id_; }

 private:
  std::string question_id_;
};

// Mean of the correctness labels. Throws ValidationError when empty.
double question_accuracy(std::span<const Label> y);

// 1 iff acc >= 0.5.
Label binarize_accuracy(double acc);

// Equal-width bins [b/B, (b+1)/B) on confidence; the last bin includes 1.0.
std::vector<ReliabilityBin> reliability_bins(
    std::span<const CalibrationRecord> records, std::size_t num_bins);

// Count-weighted |mean accuracy - mean confidence| over the bins.
// Independent of record order.
double ece(std::span<const CalibrationRecord> records, std::size_t num_bins = 10);

// Mann-Whitney AUROC of confidence against binarized accuracy, ties counted
// as one half. Empty when every label is the same.
std::optional<double> auroc(std::span<const CalibrationRecord> records);
std::optional<double> auroc(std::span<const double> scores,
                            std::span<const Label> labels);

// Prompt plus output tokens summed over every rollout of the group.
double token_cost(const RolloutGroup& group);

struct QuestionEval {
  CalibrationRecord record;
  EquivalencePartition partition;
  SemanticUncertainty uncertainty;
};

QuestionEval evaluate_question(const RolloutGroup& group, Judge& judge,
                               ClusteringMethod clustering);

// Aggregates records (sorted by question_id first) into a report.
MetricsReport summarize(std::vector<CalibrationRecord> records,
                        std::size_t num_bins);

// Full pipeline. Fails fast with QuestionError unless cfg.skip_errors, in
// which case failing questions land in `rejected`. `details`, when given,
// receives one entry per evaluated question in input order.
MetricsReport evaluate(std::span<const RolloutGroup> groups, Judge& judge,
                       const EvalConfig& cfg,
                       std::vector<QuestionEval>* details = nullptr);

// Scores external (answer, confidence) records against the gold answers of
// `gold_groups`, applying the format-error fallback.
MetricsReport evaluate_verbalized(std::span<const VerbalizedRecord> records,
                                  std::span<const RolloutGroup> gold_groups,
                                  Judge& judge, const EvalConfig& cfg);

nlohmann::ordered_json report_to_json(const MetricsReport& report);
std::string bins_to_csv(const MetricsReport& report);
nlohmann::ordered_json partition_to_json(const std::string& question_id,
                                         const QuestionEval& eval);

}  // namespace semcal

#endif  // SEMCAL_METRICS_HPP_
