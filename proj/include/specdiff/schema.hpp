// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace specdiff {

using nlohmann::json;

enum class SchemaKind { kString, kInteger, kNumber, kBoolean, kArray, kObject, kNull, kAny };

std::string_view to_string(SchemaKind kind);
std::optional<SchemaKind> schema_kind_from_string(std::string_view text);

// Expected cross-implementation behavior of one response field.
enum class ConsistencyPolicy { kMustIdentical, kMayDivergent, kMustDivergent };

// Wire names: "must-identical", "may-divergent", "must-divergent".
std::string_view to_string(ConsistencyPolicy policy);
std::optional<ConsistencyPolicy> policy_from_string(std::string_view text);

struct SchemaNode;
using SchemaPtr = std::shared_ptr<const SchemaNode>;

struct SchemaProperty {
    std::string name;
    SchemaPtr schema;
};

// The supported JSON-Schema subset. Immutable once built; share via SchemaPtr.
struct SchemaNode {
    SchemaKind kind = SchemaKind::kAny;
    std::optional<std::string> pattern;
    std::shared_ptr<const std::regex> compiled_pattern;
    std::optional<std::vector<json>> enum_values;
    std::vector<SchemaPtr> any_of;
    std::vector<SchemaProperty> properties;
    std::vector<std::string> required;
    SchemaPtr items;
    std::optional<std::uint64_t> min_items;
    std::optional<std::uint64_t> max_items;
    bool additional_properties_allowed = true;
    std::optional<std::string> title;
    std::optional<std::string> description;

    // Annotations carried as "x-" extension keywords.
    std::optional<ConsistencyPolicy> consistency_policy;
    bool environmental = false;
    bool unordered = false;

    const SchemaNode* property(std::string_view name) const;
    bool is_required(std::string_view name) const;
    bool has_children() const { return !any_of.empty() || !properties.empty() || items != nullptr; }
};

bool operator==(const SchemaNode& a, const SchemaNode& b);

// Maps a local "$ref" ("#/components/schemas/X") to its target document.
// Returning nullptr means the reference cannot be resolved.
using RefResolver = std::function<const json*(std::string_view ref)>;

// Parses a schema document. `where` names the location for error messages
// (e.g. "eth_getBalance/params/Address"). Throws Error on unsupported
// keywords, invariant violations and unresolvable references.
SchemaPtr parse_schema(const json& document, const std::string& where, const RefResolver& resolver = {});

json schema_to_json(const SchemaNode& node);

// True iff `value` satisfies every constraint of `schema`.
bool validate_value(const SchemaNode& schema, const json& value);

bool json_matches_kind(SchemaKind kind, const json& value);

// True when the node describes a hex quantity (minimal hex unsigned integer).
bool is_quantity_schema(const SchemaNode& node);

SchemaPtr make_schema(SchemaNode node);

}  // namespace specdiff
