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

#include "semcal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace semcal {
namespace {

std::size_t bin_index(double confidence, std::size_t num_bins) {
  const auto b = static_cast<std::size_t>(
      std::floor(confidence * static_cast<double>(num_bins)));
  return std::min(b, num_bins - 1);
}

void check_records(std::span<const CalibrationRecord> records) {
  if (records.empty()) throw ValidationError("no calibration records");
  for (const auto& r : records) {
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0) ||
        !(r.accuracy >= 0.0 && r.accuracy <= 1.0)) {
      throw ValidationError("record '" + r.question_id +
                            "' has confidence or accuracy outside [0, 1]");
    }
  }
}

nlohmann::ordered_json number_or_null(std::size_t count, double v) {
  return count == 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v);
}

std::string csv_number(double v) { return nlohmann::json(v).dump(); }

}  // namespace

double question_accuracy(std::span<const Label> y) {
  if (y.empty()) throw ValidationError("accuracy of an empty rollout group");
  std::size_t correct = 0;
  for (Label l : y) correct += l ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

Label binarize_accuracy(double acc) { return acc >= 0.5 ? 1 : 0; }

std::vector<ReliabilityBin> reliability_bins(
    std::span<const CalibrationRecord> records, std::size_t num_bins) {
  if (num_bins < 1) throw ConfigError("number of bins must be >= 1");
  check_records(records);

  // Sum in a canonical order so the result does not depend on input order.
  std::vector<std::pair<double, double>> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.emplace_back(r.confidence, r.accuracy);
  std::sort(sorted.begin(), sorted.end());

  std::vector<ReliabilityBin> bins(num_bins);
  for (std::size_t b = 0; b < num_bins; ++b) {
    bins[b].lo = static_cast<double>(b) / static_cast<double>(num_bins);
    bins[b].hi = static_cast<double>(b + 1) / static_cast<double>(num_bins);
  }
  std::vector<double> conf_sum(num_bins, 0.0), acc_sum(num_bins, 0.0);
  for (const auto& [conf, acc] : sorted) {
    const auto b = bin_index(conf, num_bins);
    ++bins[b].count;
    conf_sum[b] += conf;
    acc_sum[b] += acc;
  }
  for (std::size_t b = 0; b < num_bins; ++b) {
    if (bins[b].count == 0) continue;
    const auto n = static_cast<double>(bins[b].count);
    bins[b].mean_conf = conf_sum[b] / n;
    bins[b].mean_acc = acc_sum[b] / n;
  }
  return bins;
}

double ece(std::span<const CalibrationRecord> records, std::size_t num_bins) {
  const auto bins = reliability_bins(records, num_bins);
  const auto n = static_cast<double>(records.size());
  double total = 0.0;
  for (const auto& bin : bins) {
    if (bin.count == 0) continue;
    total += static_cast<double>(bin.count) / n *
             std::abs(bin.mean_acc - bin.mean_conf);
  }
  return total;
}

std::optional<double> auroc(std::span<const double> scores,
                            std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw InvariantError("scores and labels differ in length");
  }
  if (scores.empty()) throw ValidationError("AUROC of an empty record set");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives, kept doubled so
  // every quantity stays an exact integer.
  std::uint64_t pos = 0;
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const std::uint64_t twice_avg_rank = (i + 1) + (j + 1);
    for (std::size_t m = i; m <= j; ++m) {
      if (labels[order[m]]) {
        ++pos;
        twice_rank_sum += twice_avg_rank;
      }
    }
    i = j + 1;
  }
  const std::uint64_t neg = n - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  // U = rank_sum - pos(pos+1)/2, counted in halves.
  const std::uint64_t twice_u = twice_rank_sum - pos * (pos + 1);
  return static_cast<double>(twice_u) / 2.0 /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

std::optional<double> auroc(std::span<const CalibrationRecord> records) {
  std::vector<double> scores;
  std::vector<Label> labels;
  scores.reserve(records.size());
  labels.reserve(records.size());
  for (const auto& r : records) {
    scores.push_back(r.confidence);
    labels.push_back(binarize_accuracy(r.accuracy));
  }
  return auroc(scores, labels);
}

double token_cost(const RolloutGroup& group) {
  double total = 0.0;
  for (const auto& r : group.rollouts) {
    total += static_cast<double>(r.prompt_tokens + r.output_tokens);
  }
  return total;
}

QuestionEval evaluate_question(const RolloutGroup& group, Judge& judge,
                               ClusteringMethod clustering) {
  validate_group(group);
  const PairwiseAgreement agreement = pairwise_matrix(group, judge);
  QuestionEval out;
  out.partition = partition(agreement, clustering);
  out.uncertainty = semantic_uncertainty(out.partition);
  out.record.question_id = group.question_id;
  out.record.confidence = out.uncertainty.confidence;
  out.record.accuracy = question_accuracy(agreement.correctness);
  out.record.token_cost = token_cost(group);
  return out;
}

MetricsReport summarize(std::vector<CalibrationRecord> records,
                        std::size_t num_bins) {
  check_records(records);
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.question_id < b.question_id; });
  MetricsReport report;
  report.num_questions = records.size();
  const auto n = static_cast<double>(records.size());
  double acc = 0.0, tok = 0.0;
  for (const auto& r : records) {
    acc += r.accuracy;
    tok += r.token_cost;
  }
  report.mean_accuracy = acc / n;
  report.mean_token_cost = tok / n;
  report.bins = reliability_bins(records, num_bins);
  report.ece = ece(records, num_bins);
  report.auroc = auroc(std::span<const CalibrationRecord>(records));
  report.records = std::move(records);
  return report;
}

MetricsReport evaluate(std::span<const RolloutGroup> groups, Judge& judge,
                       const EvalConfig& cfg,
                       std::vector<QuestionEval>* details) {
  if (groups.empty()) throw ValidationError("no questions to evaluate");
  if (cfg.bins < 1) throw ConfigError("number of bins must be >= 1");
  std::vector<CalibrationRecord> records;
  std::vector<RejectedQuestion> rejected;
  for (const auto& group : groups) {
    try {
      QuestionEval q = evaluate_question(group, judge, cfg.clustering);
      records.push_back(q.record);
      if (details) details->push_back(std::move(q));
    } catch (const Error& e) {
      if (!cfg.skip_errors) throw QuestionError(group.question_id, e.what());
      rejected.push_back({group.question_id, e.what()});
    }
  }
  if (records.empty()) {
    throw ValidationError("every question failed evaluation");
  }
  MetricsReport report = summarize(std::move(records), cfg.bins);
  std::sort(rejected.begin(), rejected.end(),
            [](const auto& a, const auto& b) { return a.question_id < b.question_id; });
  report.rejected = std::move(rejected);
  return report;
}

MetricsReport evaluate_verbalized(std::span<const VerbalizedRecord> records,
                                  std::span<const RolloutGroup> gold_groups,
                                  Judge& judge, const EvalConfig& cfg) {
  if (records.empty()) throw ValidationError("no verbalized records");
  std::map<std::string, const RolloutGroup*> gold;
  for (const auto& g : gold_groups) gold.emplace(g.question_id, &g);

  std::vector<CalibrationRecord> rows;
  std::vector<RejectedQuestion> rejected;
  for (const auto& rec : records) {
    try {
      double acc = 0.0;
      if (rec.parse_ok) {
        auto it = gold.find(rec.question_id);
        if (it == gold.end()) throw ValidationError("no gold answers for question");
        acc = correctness(rec.answer, it->second->gold_answers, judge);
      }
      rows.push_back(apply_format_fallback(rec, acc));
    } catch (const Error& e) {
      if (!cfg.skip_errors) throw QuestionError(rec.question_id, e.what());
      rejected.push_back({rec.question_id, e.what()});
    }
  }
  if (rows.empty()) throw ValidationError("every record failed evaluation");
  MetricsReport report = summarize(std::move(rows), cfg.bins);
  std::sort(rejected.begin(), rejected.end(),
            [](const auto& a, const auto& b) { return a.question_id < b.question_id; });
  report.rejected = std::move(rejected);
  return report;
}

nlohmann::ordered_json report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["num_questions"] = report.num_questions;
  j["mean_accuracy"] = report.mean_accuracy;
  j["ece"] = report.ece;
  j["auroc"] = report.auroc ? nlohmann::ordered_json(*report.auroc)
                            : nlohmann::ordered_json(nullptr);
  j["mean_token_cost"] = report.mean_token_cost;
  auto bins = nlohmann::ordered_json::array();
  for (const auto& b : report.bins) {
    nlohmann::ordered_json bj;
    bj["lo"] = b.lo;
    bj["hi"] = b.hi;
    bj["count"] = b.count;
    bj["mean_conf"] = number_or_null(b.count, b.mean_conf);
    bj["mean_acc"] = number_or_null(b.count, b.mean_acc);
    bins.push_back(std::move(bj));
  }
  j["bins"] = std::move(bins);
  auto records = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json rj;
    rj["question_id"] = r.question_id;
    rj["confidence"] = r.confidence;
    rj["accuracy"] = r.accuracy;
    rj["token_cost"] = r.token_cost;
    records.push_back(std::move(rj));
  }
  j["records"] = std::move(records);
  auto rejected = nlohmann::ordered_json::array();
  for (const auto& r : report.rejected) {
    rejected.push_back({{"question_id", r.question_id}, {"error", r.error}});
  }
  j["rejected"] = std::move(rejected);
  return j;
}

std::string bins_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "lo,hi,count,mean_conf,mean_acc\n";
  for (const auto& b : report.bins) {
    out << csv_number(b.lo) << ',' << csv_number(b.hi) << ',' << b.count << ',';
    if (b.count > 0) {
      out << csv_number(b.mean_conf) << ',' << csv_number(b.mean_acc);
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::ordered_json partition_to_json(const std::string& question_id,
                                         const QuestionEval& eval) {
  nlohmann::ordered_json j;
  j["question_id"] = question_id;
  j["classes"] = eval.partition.classes;
  j["entropy"] = eval.uncertainty.entropy;
  j["confidence"] = eval.uncertainty.confidence;
  return j;
}

}  // namespace semcal
