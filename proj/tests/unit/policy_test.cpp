// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "specdiff/error.hpp"
#include "specdiff/pipeline.hpp"
#include "specdiff/policy.hpp"
#include "test_paths.hpp"

using namespace specdiff;

namespace {

class FailingClassifier : public PolicyClassifier {
  public:
    PolicyDecision classify(const FieldContext& field) override {
        throw Error(ErrorCode::kClassifierFailure, "down at " + field.method + " " + field.path);
    }
};

const SchemaNode* at(const SchemaNode& root, std::initializer_list<const char*> names) {
    const SchemaNode* node = &root;
    for (const char* name : names) {
        node = node->property(name);
        if (node == nullptr) return nullptr;
    }
    return node;
}

}  // namespace

TEST(Annotate, BalanceIsMustIdentical) {
    const auto spec = parse_spec(read_text_file(testpaths::source("specs/eth_getBalance.json")));
    RuleTableClassifier rules;
    const auto result = annotate_policies(spec, rules);
    EXPECT_EQ(result.spec.method("eth_getBalance")->result->consistency_policy, ConsistencyPolicy::kMustIdentical);
    EXPECT_EQ(schema_to_json(*result.spec.method("eth_getBalance")->result)["x-consistency-policy"], "must-identical");
    ASSERT_EQ(result.audit.at("eth_getBalance").size(), 1u);
}

TEST(Annotate, PeerIdentityDivergesValidatorKeysDoNot) {
    const auto spec = load_spec({testpaths::source("specs/beacon_api.json")});
    const auto& identity = *spec.method("getNodeIdentity")->result;
    EXPECT_EQ(at(identity, {"data", "peer_id"})->consistency_policy, ConsistencyPolicy::kMustDivergent);
    EXPECT_EQ(at(identity, {"data", "enr"})->consistency_policy, ConsistencyPolicy::kMustDivergent);
    const auto& validators = *spec.method("postStateValidatorIdentities")->result;
    EXPECT_EQ(at(validators, {"data"})->items->property("pubkey")->consistency_policy, ConsistencyPolicy::kMustIdentical);
    const auto& syncing = *spec.method("getSyncingStatus")->result;
    const auto* distance = at(syncing, {"data", "sync_distance"});
    EXPECT_EQ(distance->consistency_policy, ConsistencyPolicy::kMayDivergent);
    EXPECT_TRUE(distance->environmental);
}

TEST(Annotate, DescriptionRuleMatchesPeerKey) {
    const auto spec = parse_spec(R"({"methods": [{"name": "node_info", "params": [], "result": {"name": "info", "schema":
        {"type": "object", "properties": {"key": {"type": "string", "description": "the peer's public key"}}}}}]})");
    RuleTableClassifier rules;
    const auto result = annotate_policies(spec, rules);
    EXPECT_EQ(result.spec.method("node_info")->result->property("key")->consistency_policy,
              ConsistencyPolicy::kMustDivergent);
}

TEST(Annotate, ExistingAnnotationsKeptAndIdempotent) {
    const auto spec = parse_spec(R"({"methods": [{"name": "m", "params": [], "result": {"name": "r", "schema":
        {"type": "object", "x-consistency-policy": "may-divergent", "properties": {"a": {"type": "string"}}}}}]})");
    RuleTableClassifier rules;
    const auto once = annotate_policies(spec, rules);
    EXPECT_EQ(once.spec.method("m")->result->property("a")->consistency_policy, ConsistencyPolicy::kMayDivergent);
    const auto twice = annotate_policies(once.spec, rules);
    EXPECT_EQ(spec_to_json(twice.spec).dump(), spec_to_json(once.spec).dump());
}

TEST(Annotate, NullResultGetsTrivialPolicy) {
    const auto spec = parse_spec(R"({"methods": [{"name": "m", "params": [], "result": {"name": "r", "schema": {"type": "null"}}}]})");
    RuleTableClassifier rules;
    const auto result = annotate_policies(spec, rules);
    EXPECT_EQ(result.spec.method("m")->result->kind, SchemaKind::kNull);
    EXPECT_TRUE(result.spec.method("m")->result->consistency_policy.has_value());
}

TEST(Annotate, ClassifierFailureAborts) {
    const auto spec = parse_spec(read_text_file(testpaths::source("specs/eth_getBalance.json")));
    FailingClassifier failing;
    try {
        annotate_policies(spec, failing);
        FAIL() << "expected classifier failure";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kClassifierFailure);
        EXPECT_NE(std::string(e.what()).find("eth_getBalance"), std::string::npos);
    }
}
