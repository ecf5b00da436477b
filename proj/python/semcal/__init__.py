# Copyright 2026 The semcal Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http:#www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Semantic calibration toolkit.

Thin Python layer over the native core: rollout groups and reports travel as
plain dicts, everything numeric is computed in C++.
"""

import json

from ._semcal import (
    JudgeUnavailableError,
    PairwiseAgreement,
    SemcalError,
    answer_tokens,
    auroc,
    calibration_reward,
    confidence,
    ece,
    f1_judge,
    f1_score,
    grpo_advantages,
    meanfield_surrogate,
    normalize_answer,
    partition,
    schedule_lambda,
    semantic_entropy,
    semantic_uncertainty,
    smoothed_ce,
)
from . import _semcal

__all__ = [
    "JudgeUnavailableError",
    "PairwiseAgreement",
    "SemcalError",
    "answer_tokens",
    "auroc",
    "calibration_reward",
    "confidence",
    "csr_reward",
    "ece",
    "evaluate_file",
    "f1_judge",
    "f1_score",
    "grpo_advantages",
    "judge_group",
    "meanfield_surrogate",
    "normalize_answer",
    "partition",
    "schedule_lambda",
    "score_group",
    "semantic_entropy",
    "semantic_uncertainty",
    "simulate",
    "smoothed_ce",
    "verify_meanfield",
]


def _jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line]


def judge_group(group, tau=0.55):
    """Agreement matrix and correctness of one rollout group under F1."""
    return _semcal.judge_group(json.dumps(group), tau)


def csr_reward(agreement, t, total_steps, **kwargs):
    out = json.loads(_semcal.csr_reward_json(agreement, t, total_steps, **kwargs))
    del out["question_id"]
    return out


def score_group(group, t, total_steps, **kwargs):
    """Same report as one line of `semcal reward`."""
    return json.loads(
        _semcal.score_group_json(json.dumps(group), t, total_steps, **kwargs))


def evaluate_file(path, **kwargs):
    return json.loads(_semcal.eval_file(str(path), **kwargs))


def verify_meanfield(k_list=(4, 16, 64, 256), **kwargs):
    return _jsonl(_semcal.verify_meanfield_jsonl(list(k_list), **kwargs))


def simulate(objective="csr", **kwargs):
    return _jsonl(_semcal.simulate_jsonl(objective, **kwargs))
