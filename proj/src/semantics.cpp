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

#include "semcal/semantics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "semcal/error.hpp"

namespace semcal {
namespace {

std::vector<std::vector<std::size_t>> greedy_classes(const PairwiseAgreement& a) {
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t j = 0; j < a.k; ++j) {
    bool placed = false;
    for (auto& cls : classes) {
      if (a.at(cls.front(), j)) {
        cls.push_back(j);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({j});
  }
  return classes;
}

std::vector<std::vector<std::size_t>> closure_classes(const PairwiseAgreement& a) {
  std::vector<std::size_t> parent(a.k);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < a.k; ++i) {
    for (std::size_t j = i + 1; j < a.k; ++j) {
      if (!a.at(i, j)) continue;
      auto ri = find(i), rj = find(j);
      // Lower index stays root so classes come out ordered by first member.
      if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
  }
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> slot(a.k, a.k);
  for (std::size_t j = 0; j < a.k; ++j) {
    auto r = find(j);
    if (slot[r] == a.k) {
      slot[r] = classes.size();
      classes.emplace_back();
    }
    classes[slot[r]].push_back(j);
  }
  return classes;
}

}  // namespace

EquivalencePartition partition(const PairwiseAgreement& agreement,
                               ClusteringMethod method) {
  agreement.validate();
  if (agreement.k == 0) throw InvariantError("cannot partition an empty group");
  EquivalencePartition out;
  out.classes = method == ClusteringMethod::kGreedy ? greedy_classes(agreement)
                                                    : closure_classes(agreement);
  out.probs = class_probabilities(out.classes, agreement.k);
  return out;
}

std::vector<double> class_probabilities(
    const std::vector<std::vector<std::size_t>>& classes, std::size_t k) {
  std::vector<double> probs;
  probs.reserve(classes.size());
  for (const auto& cls : classes) {
    probs.push_back(static_cast<double>(cls.size()) / static_cast<double>(k));
  }
  return probs;
}

double semantic_entropy(std::span<const double> probs) {
  if (probs.empty()) throw InvariantError("empty class distribution");
  double total = 0.0;
  double h = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) {
      throw InvariantError("class probabilities must be positive");
    }
    total += p;
    h -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvariantError("class probabilities sum to " + std::to_string(total));
  }
  // A single class is exactly zero entropy; avoid -0.0.
  return h > 0.0 ? h : 0.0;
}

double confidence(double entropy) {
  if (entropy < 0.0 || std::isnan(entropy)) {
    throw InvariantError("entropy must be non-negative");
  }
  return std::exp(-entropy);
}

SemanticUncertainty semantic_uncertainty(const EquivalencePartition& p) {
  SemanticUncertainty u;
  u.entropy = semantic_entropy(p.probs);
  u.confidence = confidence(u.entropy);
  u.num_classes = p.num_classes();
  return u;
}

}  // namespace semcal
