// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specdiff/harness.hpp"
#include "specdiff/schema.hpp"

namespace specdiff {

enum class DivergenceKind { kValueMismatch, kMissingField, kExtraField, kTypeMismatch, kStatusMismatch, kAvailability };

std::string_view to_string(DivergenceKind kind);
std::optional<DivergenceKind> divergence_kind_from_string(std::string_view text);

inline constexpr std::string_view kStatusPath = "/$status";

struct Divergence {
    std::string field_path;
    DivergenceKind kind = DivergenceKind::kValueMismatch;
    // nullopt marks absence (missing key, short array, unavailable endpoint).
    std::map<int, std::optional<json>> values;
    ConsistencyPolicy policy = ConsistencyPolicy::kMustIdentical;
    bool environmental = false;
    SchemaPtr schema;  // schema at field_path when known
};

json divergence_to_json(const Divergence& divergence);

// Schema of a full response body: the JSON-RPC envelope around the result
// schema, or the result schema itself for REST.
SchemaPtr response_schema(const MethodSpec& method);

// Structural comparison of one request's records. Objects are compared as
// key sets, arrays index-wise (multiset when the schema says x-unordered),
// statuses at "/$status"; transport failures give one availability
// divergence at "/". `schema` describes the whole body; may be null.
std::vector<Divergence> diff_records(const std::vector<ResponseRecord>& records, const SchemaPtr& schema);
std::vector<Divergence> diff_records(const std::vector<ResponseRecord>& records, const MethodSpec& method);

// Deterministic equivalence: hex case folding, quantity hex by integer value,
// decimal integer strings numerically, otherwise deep equality.
bool canonical_equivalent(const json& a, const json& b, const SchemaNode* schema);

}  // namespace specdiff
