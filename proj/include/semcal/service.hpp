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

#ifndef SEMCAL_SERVICE_HPP_
#define SEMCAL_SERVICE_HPP_

// Reward-scoring HTTP service.
//
//   POST /v1/score   body: one rollout-group object plus {"t": int}
//                    200 -> reward report object (same as `semcal reward`)
//                    400 -> invalid body, K < 2, t out of range
//                    502 -> judge failure
//   GET  /healthz    200 "ok"
//
// Requests share only the judge (and its cache).

#include <memory>
#include <string>
#include <utility>

#include "semcal/commands.hpp"

namespace semcal {

struct ScoreResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class RewardService {
 public:
  // Throws ConfigError for an invalid reward or judge configuration.
  explicit RewardService(const RunConfig& cfg);
  RewardService(const RunConfig& cfg, std::unique_ptr<Judge> judge);
  ~RewardService();

  RewardService(const RewardService&) = delete;
  RewardService& operator=(const RewardService&) = delete;

  // Transport-independent request handler.
  ScoreResponse score(const std::string& body) const;

  // Binds `host` on `port` (0 picks a free port) and returns the bound port,
  // or -1 on failure.
  int bind(const std::string& host, int port);
  // Serves until stop(); returns false if the server failed.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace semcal

#endif  // SEMCAL_SERVICE_HPP_
