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

#ifndef SEMCAL_ROLLOUT_HPP_
#define SEMCAL_ROLLOUT_HPP_

// Rollout data model, answer normalization and JSONL ingestion.
//
// Rollout file, one group per line:
//   {"question_id": str, "question": str, "gold_answers": [str, ...],
//    "rollouts": [{"text": str, "prompt_tokens": int,
//                  "output_tokens": int}, ...]}
// Verbalized-confidence file, one record per line:
//   {"question_id": str, "answer": str, "confidence": float|null,
//    "parse_ok": bool}
//
// Unknown fields are ignored and reported through the warning sink.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace semcal {

struct Rollout {
  std::size_t index = 0;  // position within its group
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t output_tokens = 0;

  bool operator==(const Rollout&) const = default;
};

struct RolloutGroup {
  std::string question_id;
  std::string question;
  std::vector<std::string> gold_answers;
  std::vector<Rollout> rollouts;

  std::size_t k() const { return rollouts.size(); }
  bool operator==(const RolloutGroup&) const = default;
};

// An (answer, confidence) pair produced by a verbalized-confidence method.
struct VerbalizedRecord {
  std::string question_id;
  std::string answer;
  std::optional<double> confidence;
  bool parse_ok = true;

  bool operator==(const VerbalizedRecord&) const = default;
};

// One evaluated question: confidence c(x), accuracy Acc(x), token cost.
struct CalibrationRecord {
  std::string question_id;
  double confidence = 0.0;
  double accuracy = 0.0;
  double token_cost = 0.0;

  bool operator==(const CalibrationRecord&) const = default;
};

using WarningSink = std::function<void(const std::string&)>;

// Lowercase, drop every codepoint that is neither alphanumeric nor
// whitespace, remove the articles "a", "an", "the", and collapse runs of
// whitespace to a single space. Idempotent.
std::string normalize_answer(std::string_view text);

// Whitespace tokens of normalize_answer(text).
std::vector<std::string> answer_tokens(std::string_view text);

// Throws ValidationError if `group` breaks an invariant.
void validate_group(const RolloutGroup& group);

RolloutGroup group_from_json(const nlohmann::json& j,
                             const WarningSink& warn = {});
nlohmann::ordered_json group_to_json(const RolloutGroup& group);

// Parses a rollout JSONL stream. Blank lines are skipped. Errors carry the
// 1-based line number; ordering of groups and rollouts is preserved.
std::vector<RolloutGroup> parse_rollouts(std::istream& in,
                                         const WarningSink& warn = {});
std::vector<RolloutGroup> parse_rollout_file(const std::string& path,
                                             const WarningSink& warn = {});
void write_rollouts(std::ostream& out, const std::vector<RolloutGroup>& groups);

VerbalizedRecord verbalized_from_json(const nlohmann::json& j,
                                      const WarningSink& warn = {});
std::vector<VerbalizedRecord> parse_verbalized(std::istream& in,
                                               const WarningSink& warn = {});
std::vector<VerbalizedRecord> parse_verbalized_file(
    const std::string& path, const WarningSink& warn = {});

// Format-error accounting for verbalized records: an unparseable record
// scores accuracy 0 and confidence 1. Otherwise the record's confidence and
// the caller's judged `accuracy` pass through unchanged. Throws
// ValidationError for a parsed record without a confidence.
CalibrationRecord apply_format_fallback(const VerbalizedRecord& record,
                                        double accuracy);

}  // namespace semcal

#endif  // SEMCAL_ROLLOUT_HPP_
