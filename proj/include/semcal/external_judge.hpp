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

#ifndef SEMCAL_EXTERNAL_JUDGE_HPP_
#define SEMCAL_EXTERNAL_JUDGE_HPP_

// Client for an external entailment service.
//
//   POST <endpoint>/v1/entail
//   {"pairs": [{"premise": str, "hypothesis": str}, ...]}
//   -> {"labels": [0|1, ...]}   aligned with the request order
//
// The service answers directional entailment; ExternalJudge asks both
// directions and labels a pair equivalent only if both hold.

#include <atomic>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "semcal/error.hpp"
#include "semcal/judge.hpp"

namespace semcal {

struct EntailmentQuery {
  std::string premise;
  std::string hypothesis;
};

// Retryable failure (connection refused, timeout, 5xx).
class TransportError : public Error {
 public:
  using Error::Error;
};

class EntailmentTransport {
 public:
  virtual ~EntailmentTransport() = default;
  // Throws TransportError for retryable failures, ProtocolError otherwise.
  virtual std::vector<Label> entail(
      const std::vector<EntailmentQuery>& queries) = 0;
};

class HttpEntailmentTransport : public EntailmentTransport {
 public:
  HttpEntailmentTransport(std::string endpoint,
                          std::chrono::milliseconds timeout);

  std::vector<Label> entail(
      const std::vector<EntailmentQuery>& queries) override;

 private:
  std::string host_;  // scheme://host[:port]
  std::string path_;
  std::chrono::milliseconds timeout_;
};

class ExternalJudge : public Judge {
 public:
  // Uses HttpEntailmentTransport when `transport` is null.
  explicit ExternalJudge(JudgeConfig cfg,
                         std::unique_ptr<EntailmentTransport> transport = {});

  std::vector<Label> judge(std::span<const TextPair> pairs) override;

  // Number of transport requests issued so far (successful or not).
  std::size_t requests() const { return requests_.load(); }
  std::size_t cache_size() const;

 private:
  std::vector<Label> dispatch(const std::vector<EntailmentQuery>& queries);

  JudgeConfig cfg_;
  std::unique_ptr<EntailmentTransport> transport_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Label> cache_;  // guarded by mu_
  std::atomic<std::size_t> requests_{0};
};

}  // namespace semcal

#endif  // SEMCAL_EXTERNAL_JUDGE_HPP_
