// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "specdiff/error.hpp"
#include "specdiff/filter.hpp"
#include "specdiff/oracle.hpp"
#include "specdiff/report.hpp"

using namespace specdiff;

namespace {

const char* kSpec = R"({"openrpc": "1.2.6", "methods": [{
    "name": "node_info", "params": [],
    "result": {"name": "info", "schema": {"type": "object", "properties": {
        "number": {"type": "string", "title": "quantity", "x-consistency-policy": "must-identical"},
        "peer": {"type": "string", "x-consistency-policy": "must-divergent"},
        "distance": {"type": "string", "x-consistency-policy": "may-divergent", "x-environmental": true},
        "note": {"type": "string", "x-consistency-policy": "must-identical"}}}}}]})";

ResponseRecord record(int id, json result, int status = 200) {
    ResponseRecord r;
    r.endpoint_id = id;
    r.http_status = status;
    r.body = json{{"jsonrpc", "2.0"}, {"id", 1}, {"result", std::move(result)}};
    r.raw_body = r.body->dump();
    return r;
}

RoundEntry entry(std::uint64_t id, json a, json b) {
    RoundEntry e;
    e.request.request_id = id;
    e.request.method = "node_info";
    e.request.body = {{"jsonrpc", "2.0"}, {"id", id}, {"method", "node_info"}, {"params", json::array()}};
    e.records = {record(0, std::move(a)), record(1, std::move(b))};
    for (auto& r : e.records) r.request_id = id;
    return e;
}

Divergence divergence(ConsistencyPolicy policy, json a, json b, bool environmental = false) {
    Divergence d;
    d.field_path = "/result/x";
    d.policy = policy;
    d.environmental = environmental;
    d.values = {{0, std::move(a)}, {1, std::move(b)}};
    return d;
}

// Counts questions and answers "equivalent" for every one.
class CountingOracle : public EquivalenceOracle {
  public:
    std::atomic<int> calls{0};
    OracleAnswer query(const OracleQuery&) override {
        ++calls;
        return {true, "counted"};
    }
};

const json kBase = {{"number", "0x1"}, {"peer", "a"}, {"distance", "0"}, {"note", "same"}};

RoundLog sample_log() {
    RoundLog log;
    log.entries.push_back(entry(1, kBase, kBase));
    json peer = kBase;
    peer["peer"] = "b";
    peer["distance"] = "3";
    log.entries.push_back(entry(2, kBase, peer));
    json padded = kBase;
    padded["number"] = "0x01";
    log.entries.push_back(entry(3, kBase, padded));
    json noted = kBase;
    noted["note"] = "different";
    log.entries.push_back(entry(4, kBase, noted));
    log.entries.push_back(entry(5, kBase, noted));
    return log;
}

}  // namespace

TEST(Classify, DeterministicRules) {
    const ClassifyContext none;
    auto v = deterministic_verdict(divergence(ConsistencyPolicy::kMustDivergent, "a", "b"), none);
    ASSERT_TRUE(v);
    EXPECT_EQ(v->value, VerdictValue::kFpAllowed);
    v = deterministic_verdict(divergence(ConsistencyPolicy::kMayDivergent, "1", "2", true), none);
    EXPECT_EQ(v->value, VerdictValue::kFpEnvironmental);
    EXPECT_FALSE(deterministic_verdict(divergence(ConsistencyPolicy::kMayDivergent, "1", "2"), none));
    v = deterministic_verdict(divergence(ConsistencyPolicy::kMustIdentical, "0xAB", "0xab"), none);
    EXPECT_EQ(v->value, VerdictValue::kFpSemanticEquivalent);
    EXPECT_TRUE(v->reason.starts_with("canonical"));
    EXPECT_FALSE(deterministic_verdict(divergence(ConsistencyPolicy::kMustIdentical, "0x539", "1337"), none));

    Divergence absent = divergence(ConsistencyPolicy::kMustIdentical, "x", "x");
    absent.values[1] = std::nullopt;
    EXPECT_FALSE(deterministic_verdict(absent, none));
}

TEST(Classify, AvailabilityAndSyncing) {
    Divergence d = divergence(ConsistencyPolicy::kMustIdentical, "x", "x");
    d.kind = DivergenceKind::kAvailability;
    d.values[1] = std::nullopt;
    EXPECT_EQ(deterministic_verdict(d, {})->value, VerdictValue::kGenuineBug);
    ReadinessReport readiness;
    readiness.endpoints.push_back({1, "n1", Layer::kExecution, true, 64, 5, true});
    EXPECT_EQ(deterministic_verdict(d, {&readiness})->value, VerdictValue::kFpEnvironmental);
}

TEST(Classify, OracleOutcomes) {
    const auto d = divergence(ConsistencyPolicy::kMustIdentical, "too many arguments, want at most 0",
                              "request carries more parameters than the method accepts");
    StubLookupOracle lookup = StubLookupOracle::from_json(json::parse(
        R"({"pairs": [["too many arguments, want at most 0", "request carries more parameters than the method accepts"]]})"));
    auto v = classify("m", d, {}, lookup);
    EXPECT_EQ(v.value, VerdictValue::kFpSemanticEquivalent);
    EXPECT_TRUE(v.oracle_used);
    StubFalseOracle stub;
    v = classify("m", d, {}, stub);
    EXPECT_EQ(v.value, VerdictValue::kGenuineBug);
    EXPECT_EQ(v.reason, "oracle: stub");
    UnavailableOracle down;
    v = classify("m", d, {}, down);
    EXPECT_EQ(v.value, VerdictValue::kGenuineBug);
    EXPECT_EQ(v.reason, kOracleUnavailableReason);
}

TEST(Classify, ConsensusNeedsEveryBackend) {
    const auto d = divergence(ConsistencyPolicy::kMustIdentical, "0x539", "1337");
    std::vector<std::unique_ptr<EquivalenceOracle>> backends;
    backends.push_back(std::make_unique<StubLookupOracle>(std::vector<std::vector<json>>{{"0x539", "1337"}}));
    backends.push_back(std::make_unique<StubFalseOracle>());
    ConsensusOracle split(std::move(backends));
    EXPECT_EQ(classify("m", d, {}, split).value, VerdictValue::kGenuineBug);
    auto agree = make_oracle("consensus:stub_false+stub_false");
    EXPECT_FALSE(agree->query(oracle_query_for("m", d)).semantically_equivalent);
    EXPECT_THROW(make_oracle("crystal_ball"), Error);
}

TEST(OracleAnswerParse, StrictShape) {
    auto answer = parse_oracle_answer(R"({"semantically_equivalent": true, "reason": "same"})");
    EXPECT_TRUE(answer.semantically_equivalent);
    EXPECT_EQ(answer.reason, "same");
    answer = parse_oracle_answer("```json\n{\"semantically_equivalent\": false, \"reason\": \"r\"}\n```");
    EXPECT_FALSE(answer.semantically_equivalent);
    for (const char* bad : {"", "yes", R"({"semantically_equivalent": "true", "reason": "r"})",
                            R"({"semantically_equivalent": true})",
                            R"({"semantically_equivalent": true, "reason": "r", "confidence": 1})",
                            R"(Sure! {"semantically_equivalent": true, "reason": "r"})"}) {
        EXPECT_THROW(parse_oracle_answer(bad), Error) << bad;
    }
}

TEST(FilterRound, VerdictsCountsAndDedup) {
    const auto spec = parse_spec(kSpec);
    CountingOracle oracle;
    const auto result = filter_round(sample_log(), spec, oracle);
    ASSERT_EQ(result.findings.size(), 4u);
    EXPECT_EQ(result.counts.at(VerdictValue::kFpAllowed), 1u);
    EXPECT_EQ(result.counts.at(VerdictValue::kFpEnvironmental), 1u);
    // "0x1" vs "0x01" under a quantity title is settled without the oracle.
    EXPECT_EQ(result.findings[1].verdicts[0].reason.substr(0, 9), "canonical");
    // Requests 4 and 5 ask the same question once.
    EXPECT_EQ(result.oracle_queries, 1u);
    EXPECT_EQ(oracle.calls.load(), 1);

    StubFalseOracle stub;
    const auto strict = filter_round(sample_log(), spec, stub);
    const auto entries = dedup_findings(strict.findings);
    ASSERT_EQ(entries.size(), 1u);
    EXPECT_EQ(entries[0].field_path, "/result/note");
    EXPECT_EQ(entries[0].occurrences, 2u);
    EXPECT_EQ(entries[0].first_finding, 2u);
}

TEST(FilterRound, DisabledFilterAndMonotonicity) {
    const auto spec = parse_spec(kSpec);
    StubFalseOracle stub;
    FilterOptions off;
    off.enabled = false;
    const auto unfiltered = filter_round(sample_log(), spec, stub, off);
    const auto filtered = filter_round(sample_log(), spec, stub);
    ASSERT_EQ(unfiltered.findings.size(), filtered.findings.size());
    EXPECT_EQ(unfiltered.oracle_queries, 0u);
    std::size_t genuine_off = 0;
    std::size_t genuine_on = 0;
    for (std::size_t f = 0; f < filtered.findings.size(); ++f) {
        for (std::size_t d = 0; d < filtered.findings[f].verdicts.size(); ++d) {
            EXPECT_EQ(unfiltered.findings[f].verdicts[d].reason, "filter disabled");
            const bool on = filtered.findings[f].verdicts[d].value == VerdictValue::kGenuineBug;
            genuine_on += on;
            ++genuine_off;
        }
    }
    EXPECT_LT(genuine_on, genuine_off);
    RoundLog unknown;
    unknown.entries.push_back(entry(1, kBase, kBase));
    unknown.entries[0].request.method = "nope";
    EXPECT_THROW(filter_round(unknown, spec, stub), Error);
}

TEST(Fdr, Anchors) {
    EXPECT_NEAR(compute_fdr(18, 7), 28.00, 0.005);
    EXPECT_NEAR(compute_fdr(18, 34), 65.38, 0.005);
    EXPECT_EQ(compute_fdr(5, 0), 0.0);
    EXPECT_EQ(compute_fdr(0, 3), 100.0);
    try {
        compute_fdr(0, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kUndefinedRate);
    }
}

TEST(SpecDefects, UniformValidationRejection) {
    RoundLog log;
    for (std::uint64_t id = 1; id <= 3; ++id) {
        RoundEntry e;
        e.request.request_id = id;
        e.request.method = "publish";
        e.request.validity = id == 3 ? Validity::kSyntacticInvalid : Validity::kSyntacticValid;
        for (int endpoint = 0; endpoint < 2; ++endpoint) {
            ResponseRecord r;
            r.endpoint_id = endpoint;
            r.http_status = 400;
            r.body = json{{"code", 400}, {"message", "expected 33 and 32 found"}};
            e.records.push_back(r);
        }
        log.entries.push_back(e);
    }
    auto defects = suspected_spec_defects(log);
    ASSERT_EQ(defects.size(), 1u);
    EXPECT_EQ(defects[0].method, "publish");
    log.entries[1].records[0].http_status = 200;
    EXPECT_TRUE(suspected_spec_defects(log).empty());
}

TEST(Scoring, AttributionByMethodPathAndNode) {
    const auto spec = parse_spec(kSpec);
    StubFalseOracle stub;
    const auto result = filter_round(sample_log(), spec, stub);
    mock::Injection note;
    note.node_id = 1;
    note.method = "node_info";
    note.action = mock::Action::kWrongValue;
    note.path = "/result/note";
    note.label = "genuine";
    mock::Injection unseen = note;
    unseen.path = "/result/other";
    const std::map<int, int> nodes = {{0, 0}, {1, 1}};
    const auto metrics = score_findings(result.findings, {note, unseen}, nodes);
    EXPECT_EQ(metrics.tp, 1u);
    EXPECT_EQ(metrics.missed.size(), 1u);
    EXPECT_EQ(metrics.reported, dedup_findings(result.findings).size());
}
