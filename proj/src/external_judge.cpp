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

#include "semcal/external_judge.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace semcal {
namespace {

constexpr char kFieldSeparator = '\x1f';
constexpr std::chrono::milliseconds kMaxBackoff{5000};

struct PairKey {
  std::string lo;
  std::string hi;
};

PairKey canonical(const TextPair& p) {
  std::string a = normalize_answer(p.first);
  std::string b = normalize_answer(p.second);
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

std::string cache_key(const PairKey& k) {
  return k.lo + kFieldSeparator + k.hi;
}

}  // namespace

HttpEntailmentTransport::HttpEntailmentTransport(
    std::string endpoint, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  // Split "scheme://host:port/base" into the client address and a path
  // prefix.
  auto scheme = endpoint.find("://");
  auto path_start = endpoint.find('/', scheme == std::string::npos
                                           ? 0
                                           : scheme + 3);
  if (path_start == std::string::npos) {
    host_ = endpoint;
  } else {
    host_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
  }
  path_ += "/v1/entail";
}

std::vector<Label> HttpEntailmentTransport::entail(
    const std::vector<EntailmentQuery>& queries) {
  nlohmann::json body;
  auto& pairs = body["pairs"] = nlohmann::json::array();
  for (const auto& q : queries) {
    pairs.push_back({{"premise", q.premise}, {"hypothesis", q.hypothesis}});
  }

  httplib::Client client(host_);
  if (!client.is_valid()) throw ConfigError("bad judge endpoint '" + host_ + "'");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw TransportError(host_ + path_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status >= 500 || res->status == 429 || res->status == 408) {
    throw TransportError(host_ + path_ + ": HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw ProtocolError("HTTP " + std::to_string(res->status));
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("response is not JSON");
  }
  auto labels = reply.find("labels");
  if (!reply.is_object() || labels == reply.end() || !labels->is_array()) {
    throw ProtocolError("response has no 'labels' array");
  }
  if (labels->size() != queries.size()) {
    throw ProtocolError("expected " + std::to_string(queries.size()) +
                        " labels, got " + std::to_string(labels->size()));
  }
  std::vector<Label> out;
  out.reserve(labels->size());
  for (const auto& l : *labels) {
    if (!l.is_number_integer() || (l.get<int>() != 0 && l.get<int>() != 1)) {
      throw ProtocolError("labels must be 0 or 1");
    }
    out.push_back(static_cast<Label>(l.get<int>()));
  }
  return out;
}

ExternalJudge::ExternalJudge(JudgeConfig cfg,
                             std::unique_ptr<EntailmentTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
  if (!transport_) {
    cfg_.validate();
    transport_ =
        std::make_unique<HttpEntailmentTransport>(cfg_.endpoint, cfg_.timeout);
  }
}

std::size_t ExternalJudge::cache_size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

std::vector<Label> ExternalJudge::dispatch(
    const std::vector<EntailmentQuery>& queries) {
  std::string last_error;
  auto backoff = cfg_.initial_backoff;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, kMaxBackoff);
    }
    ++requests_;
    try {
      return transport_->entail(queries);
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  throw JudgeUnavailableError(last_error + " (after " +
                              std::to_string(cfg_.max_retries) + " retries)");
}

std::vector<Label> ExternalJudge::judge(std::span<const TextPair> pairs) {
  std::vector<std::string> keys;
  keys.reserve(pairs.size());
  // Sorted and deduplicated so dispatch order never depends on input order.
  std::map<std::string, PairKey> missing;
  {
    std::shared_lock lock(mu_);
    for (const auto& p : pairs) {
      PairKey k = canonical(p);
      std::string key = cache_key(k);
      if (k.lo != k.hi && !cache_.contains(key)) missing.emplace(key, std::move(k));
      keys.push_back(std::move(key));
    }
  }

  if (!missing.empty()) {
    std::vector<EntailmentQuery> queries;
    queries.reserve(2 * missing.size());
    for (const auto& [key, k] : missing) {
      queries.push_back({k.lo, k.hi});
      queries.push_back({k.hi, k.lo});
    }
    std::vector<Label> directional;
    directional.reserve(queries.size());
    for (std::size_t start = 0; start < queries.size(); start += cfg_.batch_size) {
      const std::size_t end = std::min(queries.size(), start + cfg_.batch_size);
      std::vector<EntailmentQuery> chunk(queries.begin() + start,
                                         queries.begin() + end);
      auto labels = dispatch(chunk);
      if (labels.size() != chunk.size()) {
        throw ProtocolError("label count does not match request");
      }
      directional.insert(directional.end(), labels.begin(), labels.end());
    }
    std::unique_lock lock(mu_);
    std::size_t n = 0;
    for (const auto& entry : missing) {
      cache_[entry.first] = (directional[n] && directional[n + 1]) ? 1 : 0;
      n += 2;
    }
  }

  std::vector<Label> out;
  out.reserve(pairs.size());
  std::shared_lock lock(mu_);
  for (const auto& key : keys) {
    auto sep = key.find(kFieldSeparator);
    if (key.compare(0, sep, key, sep + 1) == 0) {
      out.push_back(1);  // identical after normalization
    } else {
      out.push_back(cache_.at(key));
    }
  }
  return out;
}

}  // namespace semcal
