// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "brute_diff.hpp"
#include "specdiff/diff.hpp"
#include "specdiff/rng.hpp"

using namespace specdiff;

namespace {

ResponseRecord record(int id, json body, int status = 200) {
    ResponseRecord r;
    r.endpoint_id = id;
    r.http_status = status;
    r.raw_body = body.dump();
    r.body = std::move(body);
    return r;
}

refcheck::DiffSet as_set(const std::vector<Divergence>& divergences) {
    refcheck::DiffSet out;
    for (const auto& d : divergences) out.insert({d.field_path, std::string(to_string(d.kind))});
    return out;
}

json random_json(Rng& rng, int depth) {
    const auto pick = depth <= 0 ? rng.uniform(0, 3) : rng.uniform(0, 5);
    switch (pick) {
        case 0: return nullptr;
        case 1: return rng.chance(1, 2);
        case 2: return static_cast<int>(rng.uniform(0, 3));
        case 3: return std::string(1, static_cast<char>('a' + rng.uniform(0, 2)));
        case 4: {
            json array = json::array();
            for (auto n = rng.uniform(0, 3); n > 0; --n) array.push_back(random_json(rng, depth - 1));
            return array;
        }
        default: {
            json object = json::object();
            for (auto n = rng.uniform(0, 3); n > 0; --n) {
                object[std::string(1, static_cast<char>('p' + rng.uniform(0, 3)))] = random_json(rng, depth - 1);
            }
            return object;
        }
    }
}

// Perturbs a copy so pairs share most structure.
json mutate(json value, Rng& rng) {
    if (value.is_object() && !value.empty() && rng.chance(3, 4)) {
        auto it = value.begin();
        std::advance(it, static_cast<long>(rng.index(value.size())));
        if (rng.chance(1, 4)) {
            value.erase(it);
        } else {
            *it = mutate(*it, rng);
        }
        return value;
    }
    if (value.is_array() && !value.empty() && rng.chance(3, 4)) {
        const auto i = rng.index(value.size());
        value[i] = mutate(value[i], rng);
        return value;
    }
    return rng.chance(1, 2) ? value : random_json(rng, 2);
}

}  // namespace

TEST(Diff, IdenticalBodiesHaveNoDivergence) {
    const json body = {{"result", {{"a", 1}, {"b", {1, 2}}}}};
    EXPECT_TRUE(diff_records({record(0, body), record(1, body), record(2, body)}, nullptr).empty());
}

TEST(Diff, KindsAndPaths) {
    const auto out = diff_records({record(0, json::parse(R"({"result": {"a": 1, "b": "x", "c": [1, 2]}})")),
                                   record(1, json::parse(R"({"result": {"a": 2, "b": 5, "c": [1]}})"))},
                                  nullptr);
    EXPECT_EQ(as_set(out), (refcheck::DiffSet{{"/result/a", "value_mismatch"},
                                              {"/result/b", "type_mismatch"},
                                              {"/result/c/1", "missing_field"}}));
    const auto& value = out[0].field_path == "/result/a" ? out[0] : out[1];
    EXPECT_EQ(value.values.at(0), json(1));
    EXPECT_EQ(value.values.at(1), json(2));
}

TEST(Diff, MinorityKeyIsExtraField) {
    const json plain = {{"result", {{"a", 1}}}};
    const json extra = {{"result", {{"a", 1}, {"extra", true}}}};
    const auto out = diff_records({record(0, plain), record(1, plain), record(2, extra)}, nullptr);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].field_path, "/result/extra");
    EXPECT_EQ(out[0].kind, DivergenceKind::kExtraField);
    EXPECT_FALSE(out[0].values.at(0).has_value());
}

TEST(Diff, StatusAndAvailability) {
    auto out = diff_records({record(0, json::object(), 200), record(1, json::object(), 500)}, nullptr);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].field_path, kStatusPath);
    EXPECT_EQ(out[0].kind, DivergenceKind::kStatusMismatch);

    ResponseRecord down;
    down.endpoint_id = 1;
    down.transport_error = TransportError::kTimeout;
    out = diff_records({record(0, {{"result", 1}}), down}, nullptr);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].kind, DivergenceKind::kAvailability);
    EXPECT_EQ(out[0].field_path, "/");
    EXPECT_FALSE(out[0].values.at(1).has_value());
    EXPECT_TRUE(diff_records({down, down}, nullptr).empty());
    EXPECT_TRUE(diff_records({record(0, {{"result", 1}})}, nullptr).empty());
}

TEST(Diff, UnorderedArraysAndPolicies) {
    const auto schema = parse_schema(json::parse(R"({"type": "object", "properties": {
        "peers": {"type": "array", "x-unordered": true, "items": {"type": "string"}},
        "id": {"type": "string", "x-consistency-policy": "must-divergent"}}})"), "s");
    auto out = diff_records({record(0, {{"peers", {"a", "b"}}, {"id", "x"}}), record(1, {{"peers", {"b", "a"}}, {"id", "x"}})},
                            schema);
    EXPECT_TRUE(out.empty());
    out = diff_records({record(0, {{"peers", {"a", "b"}}, {"id", "x"}}), record(1, {{"peers", {"a", "a"}}, {"id", "y"}})},
                       schema);
    ASSERT_EQ(out.size(), 2u);
    for (const auto& d : out) {
        if (d.field_path == "/id") {
            EXPECT_EQ(d.policy, ConsistencyPolicy::kMustDivergent);
        } else {
            EXPECT_EQ(d.field_path, "/peers");
            EXPECT_EQ(d.kind, DivergenceKind::kValueMismatch);
        }
    }
}

TEST(Diff, PointerEscaping) {
    const auto out = diff_records({record(0, {{"a/b", 1}, {"c~d", 1}}), record(1, {{"a/b", 2}, {"c~d", 2}})}, nullptr);
    EXPECT_EQ(as_set(out), (refcheck::DiffSet{{"/a~1b", "value_mismatch"}, {"/c~0d", "value_mismatch"}}));
}

TEST(Diff, AgreesWithBruteForceOnRandomPairs) {
    Rng rng(2026);
    for (int i = 0; i < 400; ++i) {
        const json a = random_json(rng, 4);
        const json b = rng.chance(1, 5) ? random_json(rng, 4) : mutate(a, rng);
        ASSERT_EQ(as_set(diff_records({record(0, a), record(1, b)}, nullptr)), refcheck::brute_diff(a, b))
            << a.dump() << " vs " << b.dump();
    }
}

TEST(Canonical, Examples) {
    const auto quantity = parse_schema(json::parse(R"({"type": "string", "pattern": "^0x(0|[1-9a-f][0-9a-f]*)$"})"), "q");
    EXPECT_TRUE(canonical_equivalent("0xAB", "0xab", nullptr));
    EXPECT_FALSE(canonical_equivalent("0x01", "0x1", nullptr));
    EXPECT_TRUE(canonical_equivalent("0x01", "0x1", quantity.get()));
    EXPECT_TRUE(canonical_equivalent("0x000", "0x0", quantity.get()));
    EXPECT_TRUE(canonical_equivalent("0042", "42", nullptr));
    EXPECT_FALSE(canonical_equivalent("0x539", "1337", nullptr));
    EXPECT_FALSE(canonical_equivalent("abc", "ABC", nullptr));
    EXPECT_TRUE(canonical_equivalent(json{{"h", "0xAA"}}, json{{"h", "0xaa"}}, nullptr));
    EXPECT_FALSE(canonical_equivalent(json{{"h", "0xAA"}}, json{{"h", "0xaa"}, {"x", 1}}, nullptr));
    EXPECT_FALSE(canonical_equivalent(json::array({1}), json::array({1, 1}), nullptr));
}

TEST(Canonical, IsAnEquivalenceRelation) {
    const std::vector<json> values = {"0x1", "0x01", "0X1", "0xa", "0xA", "0x0a", "1", "01", "10", "a", "A", "",
                                      1, 1.5, nullptr, true, json::array({"0xA"}), json::array({"0xa"})};
    const auto quantity = parse_schema(json::parse(R"({"type": "string", "title": "quantity"})"), "q");
    for (const SchemaNode* schema : {static_cast<const SchemaNode*>(nullptr), quantity.get()}) {
        for (const auto& a : values) {
            EXPECT_TRUE(canonical_equivalent(a, a, schema)) << a;
            for (const auto& b : values) {
                EXPECT_EQ(canonical_equivalent(a, b, schema), canonical_equivalent(b, a, schema)) << a << " " << b;
                for (const auto& c : values) {
                    if (canonical_equivalent(a, b, schema) && canonical_equivalent(b, c, schema)) {
                        EXPECT_TRUE(canonical_equivalent(a, c, schema)) << a << " " << b << " " << c;
                    }
                }
            }
        }
    }
}
