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


#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "semcal/error.hpp"
#include "semcal/external_judge.hpp"

namespace semcal {
namespace {

using ::testing::HasSubstr;

// Directional entailment by a fixed relation; scripted failures first.
class FakeTransport : public EntailmentTransport {
 public:
  using Relation = std::function<bool(const std::string&, const std::string&)>;
  explicit FakeTransport(Relation entails) : entails_(std::move(entails)) {}

  std::vector<Label> entail(const std::vector<EntailmentQuery>& queries) override {
    std::lock_guard lock(mu_);
    ++calls;
    batch_sizes.push_back(queries.size());
    if (transport_failures > 0) {
      --transport_failures;
      throw TransportError("connection reset");
    }
    if (protocol_failure) throw ProtocolError("garbled");
    std::vector<Label> out;
    for (const auto& q : queries) out.push_back(entails_(q.premise, q.hypothesis));
    return out;
  }

  int calls = 0;
  int transport_failures = 0;
  bool protocol_failure = false;
  std::vector<std::size_t> batch_sizes;

 private:
  std::mutex mu_;
  Relation entails_;
};

JudgeConfig fast_config() {
  JudgeConfig cfg;
  cfg.kind = JudgeConfig::Kind::kExternal;
  cfg.endpoint = "http://unused";
  cfg.initial_backoff = std::chrono::milliseconds(1);
  return cfg;
}

struct Harness {
  explicit Harness(FakeTransport::Relation r, JudgeConfig cfg = fast_config()) {
    auto t = std::make_unique<FakeTransport>(std::move(r));
    fake = t.get();
    judge = std::make_unique<ExternalJudge>(cfg, std::move(t));
  }
  FakeTransport* fake;
  std::unique_ptr<ExternalJudge> judge;
};

bool equal_rel(const std::string& a, const std::string& b) { return a == b; }

TEST(ExternalJudge, BidirectionalEntailmentIsEquivalent) {
  Harness h([](const std::string&, const std::string&) { return true; });
  EXPECT_EQ((*h.judge)("Paris", "the capital of France"), 1);
}

TEST(ExternalJudge, OneDirectionOnlyIsNotEquivalent) {
  // "james ii of england" entails "james ii" but not the reverse.
  Harness h([](const std::string& p, const std::string& q) {
    return p.find(q) != std::string::npos;
  });
  EXPECT_EQ((*h.judge)("James II", "James II of England"), 0);
  EXPECT_EQ((*h.judge)("James II of England", "James II"), 0);
}

TEST(ExternalJudge, RepeatedPairIsOneCall) {
  Harness h(equal_rel);
  const std::vector<TextPair> pairs{{"a x", "b y"}, {"b y", "a x"}, {"A x.", "b Y"}};
  const auto labels = h.judge->judge(pairs);
  EXPECT_EQ(labels, (std::vector<Label>{0, 0, 0}));
  EXPECT_EQ(h.fake->calls, 1);
  ASSERT_EQ(h.fake->batch_sizes.size(), 1u);
  EXPECT_EQ(h.fake->batch_sizes[0], 2u);  // one pair, both directions
  h.judge->judge(pairs);
  EXPECT_EQ(h.fake->calls, 1);  // served from the cache
  EXPECT_EQ(h.judge->cache_size(), 1u);
}

TEST(ExternalJudge, IdenticalAfterNormalizationSkipsService) {
  Harness h([](const std::string&, const std::string&) { return false; });
  EXPECT_EQ((*h.judge)("The Answer!", "answer"), 1);
  EXPECT_EQ(h.fake->calls, 0);
}

TEST(ExternalJudge, ChunksByBatchSize) {
  JudgeConfig cfg = fast_config();
  cfg.batch_size = 3;
  Harness h(equal_rel, cfg);
  std::vector<TextPair> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back({"p" + std::to_string(i), "q"});
  h.judge->judge(pairs);
  EXPECT_EQ(h.fake->batch_sizes, (std::vector<std::size_t>{3, 3, 2}));
}

TEST(ExternalJudge, RetriesTransientFailures) {
  Harness h([](const std::string&, const std::string&) { return true; });
  h.fake->transport_failures = 2;
  EXPECT_EQ((*h.judge)("x", "y"), 1);
  EXPECT_EQ(h.fake->calls, 3);
  EXPECT_EQ(h.judge->requests(), 3u);
}

TEST(ExternalJudge, GivesUpAsJudgeUnavailable) {
  JudgeConfig cfg = fast_config();
  cfg.max_retries = 2;
  Harness h(equal_rel, cfg);
  h.fake->transport_failures = 100;
  try {
    (*h.judge)("x", "y");
    FAIL() << "expected JudgeUnavailableError";
  } catch (const JudgeUnavailableError& e) {
    EXPECT_THAT(std::string(e.what()), HasSubstr("judge-unavailable"));
  }
  EXPECT_EQ(h.fake->calls, 3);
  EXPECT_EQ(h.judge->cache_size(), 0u);  // nothing defaulted
}

TEST(ExternalJudge, ProtocolErrorsAreNotRetried) {
  Harness h(equal_rel);
  h.fake->protocol_failure = true;
  EXPECT_THROW((*h.judge)("x", "y"), ProtocolError);
  EXPECT_EQ(h.fake->calls, 1);
}

TEST(ExternalJudge, ConcurrentCallersShareTheCache) {
  Harness h([](const std::string& a, const std::string& b) {
    return a.size() == b.size();
  });
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        const std::string a = "w" + std::to_string(i % 10);
        const std::string b = "v" + std::to_string(i % 7);
        if ((*h.judge)(a, b) != (a.size() == b.size())) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_LE(h.judge->cache_size(), 70u);
}

// Real HTTP round trips against an in-process entailment server.
class HttpJudgeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/entail", [this](const httplib::Request& req,
                                      httplib::Response& res) {
      ++hits_;
      if (fail_next_ > 0) {
        --fail_next_;
        res.status = 503;
        return;
      }
      if (garbled_) {
        res.set_content("not json", "application/json");
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json labels = nlohmann::json::array();
      for (const auto& p : body["pairs"]) {
        const auto prem = p["premise"].get<std::string>();
        const auto hyp = p["hypothesis"].get<std::string>();
        labels.push_back(prem.find(hyp) != std::string::npos ? 1 : 0);
      }
      res.set_content(nlohmann::json{{"labels", labels}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  JudgeConfig config() const {
    JudgeConfig cfg = fast_config();
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port_);
    cfg.timeout = std::chrono::milliseconds(2000);
    return cfg;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::atomic<int> fail_next_{0};
  std::atomic<bool> garbled_{false};
};

TEST_F(HttpJudgeTest, RoundTrip) {
  ExternalJudge judge(config());
  EXPECT_EQ(judge("red car", "red car!"), 1);
  EXPECT_EQ(judge("red car", "car"), 0);  // one direction only
  EXPECT_EQ(hits_.load(), 1);
}

TEST_F(HttpJudgeTest, RetriesServerErrors) {
  fail_next_ = 2;
  ExternalJudge judge(config());
  EXPECT_EQ(judge("x y", "y"), 0);
  EXPECT_EQ(hits_.load(), 3);
}

TEST_F(HttpJudgeTest, MalformedResponseIsProtocolError) {
  garbled_ = true;
  ExternalJudge judge(config());
  EXPECT_THROW(judge("x y", "y"), ProtocolError);
  EXPECT_EQ(hits_.load(), 1);
}

TEST(HttpJudge, UnreachableEndpointIsJudgeUnavailable) {
  JudgeConfig cfg = fast_config();
  cfg.endpoint = "http://127.0.0.1:1";
  cfg.timeout = std::chrono::milliseconds(200);
  cfg.max_retries = 1;
  ExternalJudge judge(cfg);
  try {
    judge("x", "y");
    FAIL() << "expected JudgeUnavailableError";
  } catch (const JudgeUnavailableError& e) {
    EXPECT_THAT(std::string(e.what()), HasSubstr("judge-unavailable"));
  }
}

}  // namespace
}  // namespace semcal
