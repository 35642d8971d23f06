// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specdiff/spec.hpp"

namespace specdiff {

enum class Validity { kSyntacticInvalid, kSyntacticValid, kSemanticValid };

enum class InvalidCategory { kUndefinedField, kMissingRequired, kConstraintViolation };

std::string_view to_string(Validity validity);
std::optional<Validity> validity_from_string(std::string_view text);
std::string_view to_string(InvalidCategory category);
std::optional<InvalidCategory> category_from_string(std::string_view text);

inline constexpr InvalidCategory kAllCategories[] = {
    InvalidCategory::kUndefinedField,
    InvalidCategory::kMissingRequired,
    InvalidCategory::kConstraintViolation,
};

// One concrete request. `args` holds the logical parameter values by name
// (absent names were not sent); `path` and `body` are the wire form.
struct TestRequest {
    std::uint64_t request_id = 0;
    std::string method;
    Transport transport = Transport::kJsonRpcPost;
    std::optional<std::string> path;
    json body;
    json args = json::object();
    Validity validity = Validity::kSyntacticValid;
    std::optional<InvalidCategory> category;
    std::optional<std::string> fault_note;
    std::vector<std::string> provenance;
    std::uint64_t seed = 0;

    // Wire-level additions that are not part of the method's parameters.
    json extra_positional = json::array();  // JSON-RPC: trailing params
    json extra_query = json::object();      // REST: undeclared query keys
    json extra_body = json::object();       // REST POST: undeclared body keys
};

bool operator==(const TestRequest& a, const TestRequest& b);

// Rebuilds `path` and `body` from `args` and the extra_* members.
void build_wire(TestRequest& request, const MethodSpec& method);

// Serialized body as sent on the wire ("" for bodiless GETs).
std::string wire_body(const TestRequest& request);

json request_to_json(const TestRequest& request);
TestRequest request_from_json(const json& document);

// Names of params that are missing (when required) or fail their schema.
std::vector<std::string> failing_params(const MethodSpec& method, const json& args);

}  // namespace specdiff
