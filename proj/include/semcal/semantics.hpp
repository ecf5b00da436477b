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

#ifndef SEMCAL_SEMANTICS_HPP_
#define SEMCAL_SEMANTICS_HPP_

// Semantic equivalence classes, discrete semantic entropy and the
// exp(-entropy) confidence proxy. Logarithms are natural throughout.

#include <cstddef>
#include <span>
#include <vector>

#include "semcal/judge.hpp"

namespace semcal {

enum class ClusteringMethod {
  kGreedy,   // join the first class whose representative agrees
  kClosure,  // connected components of the agreement graph
};

struct EquivalencePartition {
  // Disjoint, non-empty, covering 0..k-1. Each class is sorted and classes
  // are ordered by their lowest member.
  std::vector<std::vector<std::size_t>> classes;
  std::vector<double> probs;  // |classes[s]| / k

  std::size_t num_classes() const { return classes.size(); }
  bool operator==(const EquivalencePartition&) const = default;
};

struct SemanticUncertainty {
  double entropy = 0.0;
  double confidence = 1.0;
  std::size_t num_classes = 1;
};

// Throws InvariantError when the agreement matrix is not symmetric with a
// unit diagonal.
EquivalencePartition partition(const PairwiseAgreement& agreement,
                               ClusteringMethod method = ClusteringMethod::kGreedy);

std::vector<double> class_probabilities(
    const std::vector<std::vector<std::size_t>>& classes, std::size_t k);

// -sum p log p. Throws InvariantError if probs do not sum to 1 within 1e-9
// or contain a non-positive entry.
double semantic_entropy(std::span<const double> probs);

// exp(-entropy). Throws InvariantError for negative entropy.
double confidence(double entropy);

SemanticUncertainty semantic_uncertainty(const EquivalencePartition& p);

}  // namespace semcal

#endif  // SEMCAL_SEMANTICS_HPP_
