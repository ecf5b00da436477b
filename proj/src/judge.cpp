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

#include "semcal/judge.hpp"

#include <algorithm>
#include <unordered_map>

#include "semcal/error.hpp"
#include "semcal/external_judge.hpp"

namespace semcal {
namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw ConfigError("tau must lie in (0, 1], got " + std::to_string(tau));
  }
}

}  // namespace

Label Judge::operator()(std::string_view a, std::string_view b) {
  const TextPair pair{std::string(a), std::string(b)};
  return judge(std::span<const TextPair>(&pair, 1)).at(0);
}

void JudgeConfig::validate() const {
  check_tau(tau);
  if (batch_size < 1) throw ConfigError("judge batch size must be >= 1");
  if (max_retries < 0) throw ConfigError("judge retries must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("judge timeout must be > 0");
  if (kind == Kind::kExternal && endpoint.empty()) {
    throw ConfigError("external judge needs an endpoint");
  }
}

double f1_score(std::string_view a, std::string_view b) {
  const auto ta = answer_tokens(a);
  const auto tb = answer_tokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  if (ta.empty() || tb.empty()) return 0.0;

  std::unordered_map<std::string_view, int> counts;
  for (const auto& t : ta) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : tb) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  // 2PR/(P+R) with P = common/|b|, R = common/|a|.
  return 2.0 * static_cast<double>(common) /
         static_cast<double>(ta.size() + tb.size());
}

Label f1_judge(std::string_view a, std::string_view b, double tau) {
  check_tau(tau);
  return f1_score(a, b) >= tau ? 1 : 0;
}

F1Judge::F1Judge(double tau) : tau_(tau) { check_tau(tau); }

std::vector<Label> F1Judge::judge(std::span<const TextPair> pairs) {
  std::vector<Label> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(f1_score(p.first, p.second) >= tau_ ? 1 : 0);
  }
  return out;
}

std::unique_ptr<Judge> make_judge(const JudgeConfig& cfg) {
  cfg.validate();
  if (cfg.kind == JudgeConfig::Kind::kF1) {
    return std::make_unique<F1Judge>(cfg.tau);
  }
  return std::make_unique<ExternalJudge>(cfg);
}

PairwiseAgreement::PairwiseAgreement(std::size_t k)
    : k(k), labels(k * k, 0), correctness(k, 0) {
  for (std::size_t i = 0; i < k; ++i) labels[i * k + i] = 1;
}

void PairwiseAgreement::set(std::size_t i, std::size_t j, Label v) {
  labels[i * k + j] = v;
  labels[j * k + i] = v;
}

void PairwiseAgreement::validate() const {
  if (labels.size() != k * k || correctness.size() != k) {
    throw InvariantError("agreement matrix has inconsistent dimensions");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (at(i, i) != 1) {
      throw InvariantError("agreement diagonal entry " + std::to_string(i) +
                           " is not 1");
    }
    if (correctness[i] > 1) throw InvariantError("correctness is not binary");
    for (std::size_t j = i + 1; j < k; ++j) {
      if (at(i, j) > 1) throw InvariantError("agreement label is not binary");
      if (at(i, j) != at(j, i)) {
        throw InvariantError("agreement matrix is asymmetric at (" +
                             std::to_string(i) + ", " + std::to_string(j) +
                             ")");
      }
    }
  }
}

Label correctness(std::string_view answer, std::span<const std::string> gold,
                  Judge& judge) {
  if (gold.empty()) throw ValidationError("gold answer set is empty");
  std::vector<TextPair> pairs;
  pairs.reserve(gold.size());
  for (const auto& g : gold) pairs.push_back({std::string(answer), g});
  const auto labels = judge.judge(pairs);
  return std::any_of(labels.begin(), labels.end(),
                     [](Label l) { return l != 0; })
             ? 1
             : 0;
}

PairwiseAgreement pairwise_matrix(const RolloutGroup& group, Judge& judge) {
  const std::size_t k = group.k();
  if (k == 0) throw ValidationError("group '" + group.question_id + "' is empty");
  if (group.gold_answers.empty()) {
    throw ValidationError("group '" + group.question_id + "' has no gold");
  }
  PairwiseAgreement out(k);

  std::vector<TextPair> pairs;
  pairs.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      pairs.push_back({group.rollouts[i].text, group.rollouts[j].text});
    }
  }
  if (!pairs.empty()) {
    const auto labels = judge.judge(pairs);
    std::size_t n = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) out.set(i, j, labels[n++] ? 1 : 0);
    }
  }

  const std::size_t g = group.gold_answers.size();
  std::vector<TextPair> gold_pairs;
  gold_pairs.reserve(k * g);
  for (const auto& r : group.rollouts) {
    for (const auto& gold : group.gold_answers) {
      gold_pairs.push_back({r.text, gold});
    }
  }
  const auto gold_labels = judge.judge(gold_pairs);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t m = 0; m < g; ++m) {
      if (gold_labels[j * g + m]) out.correctness[j] = 1;
    }
  }
  return out;
}

}  // namespace semcal
