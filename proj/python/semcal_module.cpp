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


// Python bindings for the semcal core. Structured values cross the boundary
// as JSON text; the pure-Python package turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semcal/commands.hpp"
#include "semcal/error.hpp"
#include "semcal/judge.hpp"
#include "semcal/lab.hpp"
#include "semcal/metrics.hpp"
#include "semcal/reward.hpp"
#include "semcal/rollout.hpp"
#include "semcal/semantics.hpp"

namespace py = pybind11;

namespace {

semcal::ClusteringMethod parse_clustering(const std::string& name) {
  if (name == "greedy") return semcal::ClusteringMethod::kGreedy;
  if (name == "closure") return semcal::ClusteringMethod::kClosure;
  throw semcal::ConfigError("unknown clustering method '" + name + "'");
}

semcal::PairwiseAgreement make_agreement(
    const std::vector<std::vector<int>>& labels,
    const std::vector<int>& correctness) {
  const std::size_t k = labels.size();
  if (correctness.size() != k) {
    throw semcal::ValidationError("correctness must have one entry per row");
  }
  semcal::PairwiseAgreement a(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (labels[i].size() != k) {
      throw semcal::ValidationError("labels must be a square matrix");
    }
    for (std::size_t j = 0; j < k; ++j) {
      a.labels[i * k + j] = static_cast<semcal::Label>(labels[i][j]);
    }
    a.correctness[i] = static_cast<semcal::Label>(correctness[i]);
  }
  a.validate();
  return a;
}

semcal::RewardConfig reward_config(const std::string& schedule,
                                   double lambda_min, double lambda_max,
                                   std::int64_t total_steps, double slope,
                                   const std::string& mode, double epsilon) {
  semcal::RewardConfig cfg;
  cfg.calibration_mode = semcal::parse_calibration_mode(mode);
  cfg.epsilon = epsilon;
  cfg.schedule.kind = semcal::parse_schedule_kind(schedule);
  cfg.schedule.lambda_min = lambda_min;
  cfg.schedule.lambda_max = lambda_max;
  cfg.schedule.total_steps = total_steps;
  cfg.schedule.slope = slope;
  cfg.validate();
  return cfg;
}

std::vector<semcal::CalibrationRecord> to_records(
    const std::vector<double>& confidences,
    const std::vector<double>& accuracies) {
  if (confidences.size() != accuracies.size()) {
    throw semcal::ValidationError("confidences and accuracies differ in length");
  }
  std::vector<semcal::CalibrationRecord> records(confidences.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].question_id = std::to_string(i);
    records[i].confidence = confidences[i];
    records[i].accuracy = accuracies[i];
  }
  return records;
}

}  // namespace

PYBIND11_MODULE(_semcal, m) {
  m.doc() = "Semantic calibration toolkit (native core)";

  // Translators run newest first, so the subclass is registered last.
  auto& error =
      py::register_exception<semcal::Error>(m, "SemcalError", PyExc_ValueError);
  py::register_exception<semcal::JudgeUnavailableError>(
      m, "JudgeUnavailableError", error.ptr());

  // Answers and the F1 judge.
  m.def("normalize_answer", &semcal::normalize_answer, py::arg("text"));
  m.def("answer_tokens", &semcal::answer_tokens, py::arg("text"));
  m.def("f1_score", &semcal::f1_score, py::arg("a"), py::arg("b"));
  m.def(
      "f1_judge",
      [](const std::string& a, const std::string& b, double tau) {
        return static_cast<int>(semcal::f1_judge(a, b, tau));
      },
      py::arg("a"), py::arg("b"), py::arg("tau") = 0.55);

  py::class_<semcal::PairwiseAgreement>(m, "PairwiseAgreement")
      .def(py::init(&make_agreement), py::arg("labels"), py::arg("correctness"))
      .def_readonly("k", &semcal::PairwiseAgreement::k)
      .def_property_readonly(
          "labels",
          [](const semcal::PairwiseAgreement& a) {
            std::vector<std::vector<int>> rows(a.k, std::vector<int>(a.k));
            for (std::size_t i = 0; i < a.k; ++i) {
              for (std::size_t j = 0; j < a.k; ++j) rows[i][j] = a.at(i, j);
            }
            return rows;
          })
      .def_property_readonly("correctness",
                             [](const semcal::PairwiseAgreement& a) {
                               return std::vector<int>(a.correctness.begin(),
                                                       a.correctness.end());
                             });

  m.def(
      "judge_group",
      [](const std::string& group_json, double tau) {
        const auto group =
            semcal::group_from_json(nlohmann::json::parse(group_json));
        semcal::validate_group(group);
        semcal::F1Judge judge(tau);
        return semcal::pairwise_matrix(group, judge);
      },
      py::arg("group_json"), py::arg("tau") = 0.55);

  // Semantic entropy.
  m.def(
      "partition",
      [](const semcal::PairwiseAgreement& a, const std::string& method) {
        return semcal::partition(a, parse_clustering(method)).classes;
      },
      py::arg("agreement"), py::arg("method") = "greedy");
  m.def(
      "semantic_entropy",
      [](const std::vector<double>& probs) {
        return semcal::semantic_entropy(probs);
      },
      py::arg("probs"));
  m.def("confidence", &semcal::confidence, py::arg("entropy"));
  m.def(
      "semantic_uncertainty",
      [](const semcal::PairwiseAgreement& a, const std::string& method) {
        const auto u = semcal::semantic_uncertainty(
            semcal::partition(a, parse_clustering(method)));
        return py::make_tuple(u.entropy, u.confidence, u.num_classes);
      },
      py::arg("agreement"), py::arg("method") = "greedy");

  // Rewards.
  m.def(
      "smoothed_ce",
      [](double a, int b, double epsilon) {
        return semcal::smoothed_ce(a, static_cast<semcal::Label>(b), epsilon);
      },
      py::arg("a"), py::arg("b"), py::arg("epsilon") = 1e-4);
  m.def(
      "calibration_reward",
      [](const semcal::PairwiseAgreement& a, const std::string& mode,
         double epsilon) {
        return semcal::calibration_reward(
            a, semcal::parse_calibration_mode(mode), epsilon);
      },
      py::arg("agreement"), py::arg("mode") = "pairwise",
      py::arg("epsilon") = 1e-4);
  m.def(
      "schedule_lambda",
      [](std::int64_t t, std::int64_t total_steps, const std::string& kind,
         double lambda_min, double lambda_max, double slope) {
        return semcal::schedule_lambda(
            reward_config(kind, lambda_min, lambda_max, total_steps, slope,
                          "pairwise", 1e-4)
                .schedule,
            t);
      },
      py::arg("t"), py::arg("total_steps"), py::arg("kind") = "linear",
      py::arg("lambda_min") = 0.1, py::arg("lambda_max") = 0.2,
      py::arg("slope") = 10.0);
  m.def(
      "grpo_advantages",
      [](const std::vector<double>& rewards, double std_floor) {
        return semcal::grpo_advantages(rewards, std_floor);
      },
      py::arg("rewards"), py::arg("std_floor") = 1e-8);
  m.def(
      "csr_reward_json",
      [](const semcal::PairwiseAgreement& a, std::int64_t t,
         std::int64_t total_steps, const std::string& schedule,
         double lambda_min, double lambda_max, double slope,
         const std::string& mode, double epsilon) {
        const auto cfg = reward_config(schedule, lambda_min, lambda_max,
                                       total_steps, slope, mode, epsilon);
        return semcal::breakdown_to_json("", t, semcal::csr_reward(a, cfg, t))
            .dump();
      },
      py::arg("agreement"), py::arg("t"), py::arg("total_steps"),
      py::arg("schedule") = "linear", py::arg("lambda_min") = 0.1,
      py::arg("lambda_max") = 0.2, py::arg("slope") = 10.0,
      py::arg("mode") = "pairwise", py::arg("epsilon") = 1e-4);

  // Metrics.
  m.def(
      "ece",
      [](const std::vector<double>& confidences,
         const std::vector<double>& accuracies, std::size_t bins) {
        return semcal::ece(to_records(confidences, accuracies), bins);
      },
      py::arg("confidences"), py::arg("accuracies"), py::arg("bins") = 10);
  m.def(
      "auroc",
      [](const std::vector<double>& scores,
         const std::vector<int>& labels) -> std::optional<double> {
        const std::vector<semcal::Label> y(labels.begin(), labels.end());
        return semcal::auroc(scores, y);
      },
      py::arg("scores"), py::arg("labels"));

  // Whole commands; each returns the artifact text the CLI would write.
  m.def(
      "eval_file",
      [](const std::string& path, double tau, std::size_t bins,
         const std::string& clustering, bool skip_errors) {
        semcal::RunConfig cfg;
        cfg.input = path;
        cfg.judge.tau = tau;
        cfg.eval.bins = bins;
        cfg.eval.clustering = parse_clustering(clustering);
        cfg.eval.skip_errors = skip_errors;
        py::gil_scoped_release release;
        return semcal::run_eval(cfg);
      },
      py::arg("path"), py::arg("tau") = 0.55, py::arg("bins") = 10,
      py::arg("clustering") = "greedy", py::arg("skip_errors") = false);
  m.def(
      "score_group_json",
      [](const std::string& group_json, std::int64_t t,
         std::int64_t total_steps, double tau, const std::string& schedule,
         double lambda_min, double lambda_max, const std::string& mode) {
        const auto group =
            semcal::group_from_json(nlohmann::json::parse(group_json));
        semcal::validate_group(group);
        const auto cfg = reward_config(schedule, lambda_min, lambda_max,
                                       total_steps, 10.0, mode, 1e-4);
        semcal::F1Judge judge(tau);
        return semcal::breakdown_to_json(
                   group.question_id, t,
                   semcal::score_group(group, judge, cfg, t))
            .dump();
      },
      py::arg("group_json"), py::arg("t"), py::arg("total_steps"),
      py::arg("tau") = 0.55, py::arg("schedule") = "linear",
      py::arg("lambda_min") = 0.1, py::arg("lambda_max") = 0.2,
      py::arg("mode") = "pairwise");

  // Synthetic-policy lab.
  m.def(
      "meanfield_surrogate",
      [](double alpha, double p, double epsilon) {
        return semcal::lab::meanfield_surrogate(alpha, p, epsilon);
      },
      py::arg("alpha"), py::arg("p"), py::arg("epsilon") = 1e-4);
  m.def(
      "verify_meanfield_jsonl",
      [](std::vector<std::size_t> k_list, std::size_t groups,
         std::size_t modes, std::uint64_t seed) {
        semcal::RunConfig cfg;
        cfg.k_list = std::move(k_list);
        cfg.groups = groups;
        cfg.mf_modes = modes;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return semcal::run_verify_meanfield(cfg);
      },
      py::arg("k_list"), py::arg("groups") = 10000, py::arg("modes") = 2,
      py::arg("seed") = 42);
  m.def(
      "simulate_jsonl",
      [](const std::string& objective, std::size_t tasks, std::int64_t steps,
         std::int64_t checkpoint_every, std::uint64_t seed) {
        semcal::RunConfig cfg;
        cfg.objective = semcal::lab::parse_objective(objective);
        cfg.tasks = tasks;
        cfg.steps = steps;
        cfg.checkpoint_every = checkpoint_every;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return semcal::run_simulate(cfg);
      },
      py::arg("objective") = "csr", py::arg("tasks") = 200,
      py::arg("steps") = 2000, py::arg("checkpoint_every") = 100,
      py::arg("seed") = 42);
}
