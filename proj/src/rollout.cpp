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

#include "semcal/rollout.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <unordered_set>

#include "semcal/error.hpp"

namespace semcal {
namespace {

using nlohmann::json;

bool is_article(std::string_view token) {
  return token == "a" || token == "an" || token == "the";
}

void append_codepoint(std::string& out, UChar32 c) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

void warn_unknown_fields(const json& obj, std::initializer_list<const char*> known,
                         std::string_view where, const WarningSink& warn) {
  if (!warn) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : known) found = found || it.key() == k;
    if (!found) {
      warn("ignoring unknown field '" + it.key() + "' in " + std::string(where));
    }
  }
}

const json& require(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(std::string(where) + " is missing '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           std::string_view where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw ValidationError(std::string(where) + ": '" + key +
                          "' must be a string");
  }
  return v.get<std::string>();
}

std::int64_t require_count(const json& obj, const char* key,
                           std::string_view where) {
  const json& v = require(obj, key, where);
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw ValidationError(std::string(where) + ": '" + key + "' overflows");
    }
    return static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) {
    throw ValidationError(std::string(where) + ": '" + key +
                          "' must be non-negative");
  }
  throw ValidationError(std::string(where) + ": '" + key +
                        "' must be an integer");
}

// Runs `fn` for every non-blank line, rewrapping errors with the line number.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
    }
    try {
      fn(j, lineno);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

WarningSink with_line(const WarningSink& warn, std::size_t lineno) {
  if (!warn) return {};
  return [warn, lineno](const std::string& msg) {
    warn("line " + std::to_string(lineno) + ": " + msg);
  };
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::vector<std::string> answer_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_article(current)) tokens.push_back(current);
    current.clear();
  };
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) continue;  // ill-formed UTF-8 is dropped like punctuation
    if (u_isUWhiteSpace(c)) {
      flush();
    } else if (u_isalnum(c)) {
      append_codepoint(current, u_tolower(c));
    }
  }
  flush();
  return tokens;
}

std::string normalize_answer(std::string_view text) {
  std::string out;
  for (const auto& token : answer_tokens(text)) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

void validate_group(const RolloutGroup& group) {
  if (group.question_id.empty()) {
    throw ValidationError("empty question_id");
  }
  if (group.gold_answers.empty()) {
    throw ValidationError("question '" + group.question_id +
                          "' has no gold_answers");
  }
  if (group.rollouts.empty()) {
    throw ValidationError("question '" + group.question_id +
                          "' has no rollouts (K=0)");
  }
  std::unordered_set<std::size_t> seen;
  for (const auto& r : group.rollouts) {
    if (r.prompt_tokens < 0 || r.output_tokens < 0) {
      throw ValidationError("question '" + group.question_id +
                            "' has a negative token count");
    }
    if (!seen.insert(r.index).second) {
      throw ValidationError("question '" + group.question_id +
                            "' repeats rollout index " +
                            std::to_string(r.index));
    }
  }
}

RolloutGroup group_from_json(const json& j, const WarningSink& warn) {
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  warn_unknown_fields(j, {"question_id", "question", "gold_answers", "rollouts"},
                      "group", warn);
  RolloutGroup group;
  group.question_id = require_string(j, "question_id", "group");
  group.question = require_string(j, "question", "group");

  const json& gold = require(j, "gold_answers", "group");
  if (!gold.is_array()) throw ValidationError("'gold_answers' must be an array");
  for (const auto& g : gold) {
    if (!g.is_string()) {
      throw ValidationError("'gold_answers' entries must be strings");
    }
    group.gold_answers.push_back(g.get<std::string>());
  }

  const json& rollouts = require(j, "rollouts", "group");
  if (!rollouts.is_array()) throw ValidationError("'rollouts' must be an array");
  for (const auto& r : rollouts) {
    if (!r.is_object()) throw ValidationError("rollouts must be objects");
    warn_unknown_fields(r, {"text", "prompt_tokens", "output_tokens"},
                        "rollout", warn);
    Rollout rollout;
    rollout.index = group.rollouts.size();
    rollout.text = require_string(r, "text", "rollout");
    rollout.prompt_tokens = require_count(r, "prompt_tokens", "rollout");
    rollout.output_tokens = require_count(r, "output_tokens", "rollout");
    group.rollouts.push_back(std::move(rollout));
  }
  validate_group(group);
  return group;
}

nlohmann::ordered_json group_to_json(const RolloutGroup& group) {
  nlohmann::ordered_json j;
  j["question_id"] = group.question_id;
  j["question"] = group.question;
  j["gold_answers"] = group.gold_answers;
  auto rollouts = nlohmann::ordered_json::array();
  for (const auto& r : group.rollouts) {
    nlohmann::ordered_json rj;
    rj["text"] = r.text;
    rj["prompt_tokens"] = r.prompt_tokens;
    rj["output_tokens"] = r.output_tokens;
    rollouts.push_back(std::move(rj));
  }
  j["rollouts"] = std::move(rollouts);
  return j;
}

std::vector<RolloutGroup> parse_rollouts(std::istream& in,
                                         const WarningSink& warn) {
  std::vector<RolloutGroup> groups;
  std::set<std::string> ids;
  for_each_line(in, [&](const json& j, std::size_t lineno) {
    RolloutGroup group = group_from_json(j, with_line(warn, lineno));
    if (!ids.insert(group.question_id).second) {
      throw ValidationError("duplicate question_id '" + group.question_id + "'");
    }
    groups.push_back(std::move(group));
  });
  return groups;
}

std::vector<RolloutGroup> parse_rollout_file(const std::string& path,
                                             const WarningSink& warn) {
  auto in = open_input(path);
  return parse_rollouts(in, warn);
}

void write_rollouts(std::ostream& out, const std::vector<RolloutGroup>& groups) {
  for (const auto& g : groups) out << group_to_json(g).dump() << '\n';
}

VerbalizedRecord verbalized_from_json(const json& j, const WarningSink& warn) {
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  warn_unknown_fields(j, {"question_id", "answer", "confidence", "parse_ok"},
                      "verbalized record", warn);
  VerbalizedRecord rec;
  rec.question_id = require_string(j, "question_id", "verbalized record");
  rec.answer = require_string(j, "answer", "verbalized record");
  const json& ok = require(j, "parse_ok", "verbalized record");
  if (!ok.is_boolean()) throw ValidationError("'parse_ok' must be a boolean");
  rec.parse_ok = ok.get<bool>();
  auto conf = j.find("confidence");
  if (conf != j.end() && !conf->is_null()) {
    if (!conf->is_number()) {
      throw ValidationError("'confidence' must be a number or null");
    }
    double c = conf->get<double>();
    if (!(c >= 0.0 && c <= 1.0)) {
      throw ValidationError("'confidence' must lie in [0, 1]");
    }
    rec.confidence = c;
  }
  if (!rec.parse_ok && rec.confidence) {
    throw ValidationError("record with parse_ok=false carries a confidence");
  }
  return rec;
}

std::vector<VerbalizedRecord> parse_verbalized(std::istream& in,
                                               const WarningSink& warn) {
  std::vector<VerbalizedRecord> records;
  std::set<std::string> ids;
  for_each_line(in, [&](const json& j, std::size_t lineno) {
    VerbalizedRecord rec = verbalized_from_json(j, with_line(warn, lineno));
    if (!ids.insert(rec.question_id).second) {
      throw ValidationError("duplicate question_id '" + rec.question_id + "'");
    }
    records.push_back(std::move(rec));
  });
  return records;
}

std::vector<VerbalizedRecord> parse_verbalized_file(const std::string& path,
                                                    const WarningSink& warn) {
  auto in = open_input(path);
  return parse_verbalized(in, warn);
}

CalibrationRecord apply_format_fallback(const VerbalizedRecord& record,
                                        double accuracy) {
  CalibrationRecord row;
  row.question_id = record.question_id;
  if (!record.parse_ok) {
    row.accuracy = 0.0;
    row.confidence = 1.0;
    return row;
  }
  if (!record.confidence) {
    throw ValidationError("question '" + record.question_id +
                          "': parsed record has no confidence");
  }
  row.confidence = *record.confidence;
  row.accuracy = accuracy;
  return row;
}

}  // namespace semcal
