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

#include "semcal/service.hpp"

#include "httplib.h"
#include "semcal/error.hpp"
#include "semcal/external_judge.hpp"

namespace semcal {

struct RewardService::Impl {
  RewardConfig reward;
  std::unique_ptr<Judge> judge;
  httplib::Server server;
};

namespace {

ScoreResponse error_response(int status, const std::string& reason) {
  nlohmann::json j;
  j["error"] = reason;
  return {status, j.dump()};
}

}  // namespace

RewardService::RewardService(const RunConfig& cfg)
    : RewardService(cfg, make_judge(cfg.judge)) {}

RewardService::RewardService(const RunConfig& cfg, std::unique_ptr<Judge> judge)
    : impl_(std::make_unique<Impl>()) {
  impl_->reward = resolved_reward_config(cfg);
  impl_->judge = std::move(judge);

  impl_->server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
  impl_->server.Post("/v1/score",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       const ScoreResponse r = score(req.body);
                       res.status = r.status;
                       res.set_content(r.body, r.content_type);
                     });
}

RewardService::~RewardService() { stop(); }

ScoreResponse RewardService::score(const std::string& body) const {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    return error_response(400, "body is not valid JSON");
  }
  if (!j.is_object()) return error_response(400, "body must be a JSON object");
  auto t_it = j.find("t");
  if (t_it == j.end() || !t_it->is_number_integer()) {
    return error_response(400, "body needs an integer 't'");
  }
  const auto t = t_it->get<std::int64_t>();
  j.erase("t");

  RewardBreakdown breakdown;
  RolloutGroup group;
  try {
    group = group_from_json(j);
    breakdown = score_group(group, *impl_->judge, impl_->reward, t);
  } catch (const JudgeUnavailableError& e) {
    return error_response(502, e.what());
  } catch (const ProtocolError& e) {
    return error_response(502, e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
  return {200, breakdown_to_json(group.question_id, t, breakdown).dump()};
}

int RewardService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool RewardService::listen() { return impl_->server.listen_after_bind(); }

void RewardService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace semcal
