// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <mutex>

#include "specdiff/error.hpp"
#include "specdiff/harness.hpp"
#include "specdiff/http.hpp"
#include "specdiff/mock.hpp"
#include "specdiff/pipeline.hpp"
#include "test_paths.hpp"

using namespace specdiff;

namespace {

mock::Scenario scenario_with(std::map<int, json> overrides, std::vector<mock::Injection> injections = {}) {
    mock::Scenario scenario;
    scenario.node_overrides = std::move(overrides);
    scenario.injections = std::move(injections);
    return scenario;
}

TestRequest balance_request(const std::string& address) {
    TestRequest request;
    request.request_id = 9;
    request.method = "eth_getBalance";
    request.args = {{"Address", address}, {"Block", "latest"}};
    request.body = {{"jsonrpc", "2.0"}, {"id", 9}, {"method", "eth_getBalance"}, {"params", {address, "latest"}}};
    return request;
}

}  // namespace

TEST(Readiness, MockFleetIsReady) {
    auto fleet = mock::spawn_fleet(7, 3);
    const auto report = check_readiness(fleet->endpoints(), kDefaultThresholdEpochs);
    EXPECT_TRUE(report.ready);
    EXPECT_TRUE(report.failures.empty());
    EXPECT_EQ(report.endpoints.size(), 6u);
}

TEST(Readiness, HeightMismatchAndFinality) {
    mock::Fleet fleet(scenario_with({{1, {{"height", 63}}}, {2, {{"finalized_epochs", 2}}}}));
    const auto report = check_readiness(fleet.endpoints(), 5);
    EXPECT_FALSE(report.ready);
    bool height = false;
    bool finality = false;
    for (const auto& failure : report.failures) {
        height = height || failure.starts_with("height mismatch");
        finality = finality || failure.starts_with("finality below threshold");
    }
    EXPECT_TRUE(height);
    EXPECT_TRUE(finality);
}

TEST(Readiness, SyncingFlagAndSingleEndpoint) {
    mock::Fleet fleet(scenario_with({{0, {{"syncing", true}}}}));
    const auto endpoints = fleet.endpoints();
    const auto report = check_readiness(endpoints, 5);
    EXPECT_TRUE(report.is_syncing(endpoints[0].endpoint_id));
    EXPECT_FALSE(report.is_syncing(endpoints[1].endpoint_id));
    EXPECT_TRUE(check_readiness({endpoints[1]}, 0).ready);
}

TEST(Readiness, UnreachableEndpoint) {
    Endpoint dead{0, "dead", "http://127.0.0.1:1", Layer::kExecution, 500};
    const auto report = check_readiness({dead}, 0);
    EXPECT_FALSE(report.ready);
    ASSERT_FALSE(report.failures.empty());
    EXPECT_EQ(report.failures[0], "unreachable: dead");
}

TEST(Dispatch, OrderedRecordsPerEndpoint) {
    auto fleet = mock::spawn_fleet(7, 3);
    auto endpoints = fleet->endpoints(Layer::kExecution);
    std::reverse(endpoints.begin(), endpoints.end());
    const auto records = dispatch(balance_request(fleet->chain().accounts()[1]), endpoints);
    ASSERT_EQ(records.size(), 3u);
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_EQ(records[i].endpoint_id, static_cast<int>(i));
        EXPECT_EQ(records[i].request_id, 9u);
        EXPECT_EQ(records[i].http_status, 200);
        ASSERT_TRUE(records[i].body);
        EXPECT_EQ(*records[i].body, *records[0].body);
    }
}

TEST(Dispatch, TransportFailures) {
    mock::Injection stall;
    stall.node_id = 1;
    stall.method = "eth_getBalance";
    stall.action = mock::Action::kStall;
    stall.stall_ms = 3000;
    mock::Fleet fleet(scenario_with({}, {stall}));
    auto endpoints = fleet.endpoints(Layer::kExecution, 300);
    endpoints.push_back({7, "dead", "http://127.0.0.1:1", Layer::kExecution, 300});
    const auto records = dispatch(balance_request(fleet.chain().accounts()[0]), endpoints);
    ASSERT_EQ(records.size(), 4u);
    EXPECT_FALSE(records[0].transport_error);
    EXPECT_EQ(records[1].transport_error, TransportError::kTimeout);
    EXPECT_TRUE(records[1].unavailable());
    EXPECT_EQ(records[3].transport_error, TransportError::kConnectFailure);
}

TEST(Dispatch, RestGetCarriesNoBody) {
    std::mutex mutex;
    std::vector<http::Request> seen;
    http::Server server([&](const http::Request& request) {
        std::lock_guard lock(mutex);
        seen.push_back(request);
        return http::Response{200, R"({"data": {}})"};
    });
    const int port = server.start();
    TestRequest request;
    request.method = "getNodeVersion";
    request.transport = Transport::kRestGet;
    request.path = "/eth/v1/node/version";
    const Endpoint endpoint{0, "cl", "http://127.0.0.1:" + std::to_string(port), Layer::kConsensus, 2000};
    const auto records = dispatch(request, {endpoint});
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].http_status, 200);
    ASSERT_EQ(seen.size(), 1u);
    EXPECT_EQ(seen[0].verb, "GET");
    EXPECT_EQ(seen[0].path, "/eth/v1/node/version");
    EXPECT_TRUE(seen[0].body.empty());
    EXPECT_THROW(dispatch(request, {Endpoint{0, "el", endpoint.base_url, Layer::kExecution, 2000}}), Error);
}

TEST(RunRound, CardinalityAndReplayDeterminism) {
    auto fleet = mock::spawn_fleet(7, 3);
    const auto spec = load_spec({testpaths::source("specs/eth_getBalance.json")});
    const auto batch = gen_batch(spec, {2, 2, 0}, 4);
    const auto endpoints = fleet->endpoints();
    const auto log = run_round(spec, endpoints, batch.requests);
    ASSERT_EQ(log.entries.size(), batch.requests.size());
    for (const auto& entry : log.entries) EXPECT_EQ(entry.records.size(), 3u);
    ASSERT_TRUE(log.readiness);
    EXPECT_TRUE(log.readiness->ready);

    const auto again = run_round(spec, endpoints, batch.requests);
    for (std::size_t i = 0; i < log.entries.size(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(log.entries[i].records[j].raw_body, again.entries[i].records[j].raw_body);
        }
    }
    EXPECT_TRUE(run_round(spec, endpoints, {}).entries.empty());
}

TEST(RunRound, ReadinessGate) {
    mock::Fleet fleet(scenario_with({{2, {{"height", 63}}}}));
    const auto spec = load_spec({testpaths::source("specs/eth_getBalance.json")});
    const auto batch = gen_batch(spec, {1, 1, 0}, 1);
    EXPECT_THROW(run_round(spec, fleet.endpoints(), batch.requests), ReadinessFailure);
    RoundOptions skip;
    skip.skip_readiness = true;
    EXPECT_EQ(run_round(spec, fleet.endpoints(), batch.requests, skip).entries.size(), 2u);
}

TEST(RoundLog, JsonlRoundTrip) {
    auto fleet = mock::spawn_fleet(7, 2);
    const auto spec = load_spec({testpaths::source("specs/eth_getBalance.json")});
    const auto log = run_round(spec, fleet->endpoints(), gen_batch(spec, {3, 1, 0}, 2).requests);
    const auto text = roundlog_to_jsonl(log);
    const auto parsed = roundlog_from_jsonl(text);
    EXPECT_EQ(roundlog_to_jsonl(parsed), text);
    ASSERT_EQ(parsed.entries.size(), log.entries.size());
    EXPECT_EQ(parsed.entries[0].request, log.entries[0].request);
    EXPECT_EQ(parsed.entries[0].records[1].raw_body, log.entries[0].records[1].raw_body);
}

TEST(Base64, KnownVectorsAndBinary) {
    EXPECT_EQ(base64_encode(""), "");
    EXPECT_EQ(base64_encode("f"), "Zg==");
    EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
    std::string bytes;
    for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(i));
    EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
}
