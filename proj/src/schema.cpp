// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/schema.hpp"

#include <algorithm>
#include <set>

#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    const std::set<std::string, std::less<>> kSupportedKeywords = {
        "type",         "pattern",  "enum",     "anyOf",    "properties",           "required",
        "items",        "minItems", "maxItems", "title",    "additionalProperties", "description",
        "x-consistency-policy",     "x-environmental",      "x-unordered",
    };

    [[noreturn]] void unsupported(const std::string& where, const std::string& what) {
        throw Error(ErrorCode::kUnsupportedConstruct, "unsupported schema construct '" + what + "' at " + where);
    }

    [[noreturn]] void violation(const std::string& where, const std::string& what) {
        throw Error(ErrorCode::kInvariantViolation, "schema invariant violated at " + where + ": " + what);
    }

    std::uint64_t read_count(const json& value, const std::string& where, const char* keyword) {
        if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
            violation(where, std::string(keyword) + " must be a non-negative integer");
        }
        return value.get<std::uint64_t>();
    }

    std::optional<std::string> read_text(const json& doc, const char* key, const std::string& where) {
        auto it = doc.find(key);
        if (it == doc.end()) return std::nullopt;
        if (!it->is_string()) violation(where, std::string(key) + " must be a string");
        return it->get<std::string>();
    }

    SchemaPtr parse_node(const json& doc, const std::string& where, const RefResolver& resolver,
                         std::vector<std::string>& ref_stack) {
        if (!doc.is_object()) violation(where, "schema must be a JSON object");

        if (auto ref = doc.find("$ref"); ref != doc.end()) {
            if (!ref->is_string()) violation(where, "$ref must be a string");
            const auto target = ref->get<std::string>();
            if (!target.starts_with("#/")) unsupported(where, "$ref " + target);
            if (doc.size() != 1) unsupported(where, "$ref with sibling keywords");
            if (std::find(ref_stack.begin(), ref_stack.end(), target) != ref_stack.end()) {
                unsupported(where, "recursive $ref " + target);
            }
            const json* resolved = resolver ? resolver(target) : nullptr;
            if (resolved == nullptr) violation(where, "unresolvable $ref " + target);
            ref_stack.push_back(target);
            auto node = parse_node(*resolved, where, resolver, ref_stack);
            ref_stack.pop_back();
            return node;
        }

        for (const auto& [key, _] : doc.items()) {
            if (!kSupportedKeywords.contains(key)) unsupported(where, key);
        }

        SchemaNode node;
        if (auto type = doc.find("type"); type != doc.end()) {
            if (!type->is_string()) unsupported(where, "type list");
            auto kind = schema_kind_from_string(type->get<std::string>());
            if (!kind || *kind == SchemaKind::kAny) unsupported(where, "type " + type->get<std::string>());
            node.kind = *kind;
        }
        node.title = read_text(doc, "title", where);
        node.description = read_text(doc, "description", where);

        if (auto pattern = doc.find("pattern"); pattern != doc.end()) {
            if (node.kind != SchemaKind::kString) violation(where, "pattern requires type string");
            if (!pattern->is_string()) violation(where, "pattern must be a string");
            node.pattern = pattern->get<std::string>();
            try {
                node.compiled_pattern = std::make_shared<const std::regex>(*node.pattern, std::regex::ECMAScript);
            } catch (const std::regex_error&) {
                violation(where, "pattern does not compile: " + *node.pattern);
            }
        }

        if (auto values = doc.find("enum"); values != doc.end()) {
            if (!values->is_array()) violation(where, "enum must be an array");
            node.enum_values = values->get<std::vector<json>>();
        }

        if (auto branches = doc.find("anyOf"); branches != doc.end()) {
            if (!branches->is_array() || branches->empty()) violation(where, "anyOf must be a non-empty array");
            for (std::size_t i = 0; i < branches->size(); ++i) {
                node.any_of.push_back(
                    parse_node((*branches)[i], where + "/anyOf/" + std::to_string(i), resolver, ref_stack));
            }
        }

        const bool object_keywords = doc.contains("properties") || doc.contains("required") ||
                                     doc.contains("additionalProperties");
        if (object_keywords && node.kind != SchemaKind::kObject) {
            violation(where, "properties/required/additionalProperties require type object");
        }
        if (auto props = doc.find("properties"); props != doc.end()) {
            if (!props->is_object()) violation(where, "properties must be an object");
            for (const auto& [name, sub] : props->items()) {
                node.properties.push_back({name, parse_node(sub, where + "/" + name, resolver, ref_stack)});
            }
        }
        if (auto required = doc.find("required"); required != doc.end()) {
            if (!required->is_array()) violation(where, "required must be an array");
            for (const auto& name : *required) {
                if (!name.is_string()) violation(where, "required entries must be strings");
                node.required.push_back(name.get<std::string>());
            }
            for (const auto& name : node.required) {
                if (node.property(name) == nullptr) violation(where, "required field '" + name + "' not in properties");
            }
        }
        if (auto additional = doc.find("additionalProperties"); additional != doc.end()) {
            if (!additional->is_boolean()) unsupported(where, "additionalProperties schema");
            node.additional_properties_allowed = additional->get<bool>();
        }

        const bool array_keywords = doc.contains("items") || doc.contains("minItems") || doc.contains("maxItems");
        if (array_keywords && node.kind != SchemaKind::kArray) {
            violation(where, "items/minItems/maxItems require type array");
        }
        if (auto items = doc.find("items"); items != doc.end()) {
            if (items->is_array()) unsupported(where, "tuple items");
            node.items = parse_node(*items, where + "/items", resolver, ref_stack);
        }
        if (auto min = doc.find("minItems"); min != doc.end()) node.min_items = read_count(*min, where, "minItems");
        if (auto max = doc.find("maxItems"); max != doc.end()) node.max_items = read_count(*max, where, "maxItems");
        if (node.min_items && node.max_items && *node.min_items > *node.max_items) {
            violation(where, "minItems exceeds maxItems");
        }

        if (auto policy = doc.find("x-consistency-policy"); policy != doc.end()) {
            auto parsed = policy->is_string() ? policy_from_string(policy->get<std::string>()) : std::nullopt;
            if (!parsed) violation(where, "unknown x-consistency-policy " + policy->dump());
            node.consistency_policy = parsed;
        }
        if (auto env = doc.find("x-environmental"); env != doc.end()) {
            if (!env->is_boolean()) violation(where, "x-environmental must be boolean");
            node.environmental = env->get<bool>();
        }
        if (auto unordered = doc.find("x-unordered"); unordered != doc.end()) {
            if (!unordered->is_boolean()) violation(where, "x-unordered must be boolean");
            node.unordered = unordered->get<bool>();
        }
        return make_schema(std::move(node));
    }

    bool pattern_matches(const SchemaNode& schema, const std::string& text) {
        if (!schema.compiled_pattern) return true;
        return std::regex_search(text, *schema.compiled_pattern);
    }

    bool ptr_equal(const SchemaPtr& a, const SchemaPtr& b) {
        if (a == b) return true;
        if (!a || !b) return false;
        return *a == *b;
    }

}  // namespace

std::string_view to_string(SchemaKind kind) {
    switch (kind) {
        case SchemaKind::kString: return "string";
        case SchemaKind::kInteger: return "integer";
        case SchemaKind::kNumber: return "number";
        case SchemaKind::kBoolean: return "boolean";
        case SchemaKind::kArray: return "array";
        case SchemaKind::kObject: return "object";
        case SchemaKind::kNull: return "null";
        case SchemaKind::kAny: return "any";
    }
    return "any";
}

std::optional<SchemaKind> schema_kind_from_string(std::string_view text) {
    static constexpr std::pair<std::string_view, SchemaKind> kNames[] = {
        {"string", SchemaKind::kString}, {"integer", SchemaKind::kInteger}, {"number", SchemaKind::kNumber},
        {"boolean", SchemaKind::kBoolean}, {"array", SchemaKind::kArray},   {"object", SchemaKind::kObject},
        {"null", SchemaKind::kNull},       {"any", SchemaKind::kAny},
    };
    for (const auto& [name, kind] : kNames) {
        if (name == text) return kind;
    }
    return std::nullopt;
}

std::string_view to_string(ConsistencyPolicy policy) {
    switch (policy) {
        case ConsistencyPolicy::kMustIdentical: return "must-identical";
        case ConsistencyPolicy::kMayDivergent: return "may-divergent";
        case ConsistencyPolicy::kMustDivergent: return "must-divergent";
    }
    return "must-identical";
}

std::optional<ConsistencyPolicy> policy_from_string(std::string_view text) {
    if (text == "must-identical") return ConsistencyPolicy::kMustIdentical;
    if (text == "may-divergent") return ConsistencyPolicy::kMayDivergent;
    if (text == "must-divergent") return ConsistencyPolicy::kMustDivergent;
    return std::nullopt;
}

const SchemaNode* SchemaNode::property(std::string_view name) const {
    for (const auto& prop : properties) {
        if (prop.name == name) return prop.schema.get();
    }
    return nullptr;
}

bool SchemaNode::is_required(std::string_view name) const {
    return std::find(required.begin(), required.end(), name) != required.end();
}

bool operator==(const SchemaNode& a, const SchemaNode& b) {
    if (a.kind != b.kind || a.pattern != b.pattern || a.enum_values != b.enum_values || a.required != b.required ||
        a.min_items != b.min_items || a.max_items != b.max_items ||
        a.additional_properties_allowed != b.additional_properties_allowed || a.title != b.title ||
        a.description != b.description || a.consistency_policy != b.consistency_policy ||
        a.environmental != b.environmental || a.unordered != b.unordered) {
        return false;
    }
    if (a.any_of.size() != b.any_of.size() || a.properties.size() != b.properties.size()) return false;
    for (std::size_t i = 0; i < a.any_of.size(); ++i) {
        if (!ptr_equal(a.any_of[i], b.any_of[i])) return false;
    }
    for (std::size_t i = 0; i < a.properties.size(); ++i) {
        if (a.properties[i].name != b.properties[i].name) return false;
        if (!ptr_equal(a.properties[i].schema, b.properties[i].schema)) return false;
    }
    return ptr_equal(a.items, b.items);
}

SchemaPtr make_schema(SchemaNode node) { return std::make_shared<const SchemaNode>(std::move(node)); }

SchemaPtr parse_schema(const json& document, const std::string& where, const RefResolver& resolver) {
    std::vector<std::string> ref_stack;
    return parse_node(document, where, resolver, ref_stack);
}

json schema_to_json(const SchemaNode& node) {
    json out = json::object();
    if (node.kind != SchemaKind::kAny) out["type"] = to_string(node.kind);
    if (node.title) out["title"] = *node.title;
    if (node.description) out["description"] = *node.description;
    if (node.pattern) out["pattern"] = *node.pattern;
    if (node.enum_values) out["enum"] = *node.enum_values;
    if (!node.any_of.empty()) {
        json branches = json::array();
        for (const auto& branch : node.any_of) branches.push_back(schema_to_json(*branch));
        out["anyOf"] = std::move(branches);
    }
    if (!node.properties.empty()) {
        json props = json::object();
        for (const auto& prop : node.properties) props[prop.name] = schema_to_json(*prop.schema);
        out["properties"] = std::move(props);
    }
    if (!node.required.empty()) out["required"] = node.required;
    if (!node.additional_properties_allowed) out["additionalProperties"] = false;
    if (node.items) out["items"] = schema_to_json(*node.items);
    if (node.min_items) out["minItems"] = *node.min_items;
    if (node.max_items) out["maxItems"] = *node.max_items;
    if (node.consistency_policy) out["x-consistency-policy"] = to_string(*node.consistency_policy);
    if (node.environmental) out["x-environmental"] = true;
    if (node.unordered) out["x-unordered"] = true;
    return out;
}

bool json_matches_kind(SchemaKind kind, const json& value) {
    switch (kind) {
        case SchemaKind::kString: return value.is_string();
        case SchemaKind::kInteger: return value.is_number_integer();
        case SchemaKind::kNumber: return value.is_number();
        case SchemaKind::kBoolean: return value.is_boolean();
        case SchemaKind::kArray: return value.is_array();
        case SchemaKind::kObject: return value.is_object();
        case SchemaKind::kNull: return value.is_null();
        case SchemaKind::kAny: return true;
    }
    return false;
}

bool validate_value(const SchemaNode& schema, const json& value) {
    if (!json_matches_kind(schema.kind, value)) return false;

    if (schema.enum_values) {
        const auto& values = *schema.enum_values;
        if (std::find(values.begin(), values.end(), value) == values.end()) return false;
    }
    if (schema.kind == SchemaKind::kString && !pattern_matches(schema, value.get_ref<const std::string&>())) {
        return false;
    }
    if (!schema.any_of.empty()) {
        const bool any = std::any_of(schema.any_of.begin(), schema.any_of.end(),
                                     [&](const SchemaPtr& branch) { return validate_value(*branch, value); });
        if (!any) return false;
    }
    if (schema.kind == SchemaKind::kArray) {
        const auto size = value.size();
        if (schema.min_items && size < *schema.min_items) return false;
        if (schema.max_items && size > *schema.max_items) return false;
        if (schema.items) {
            for (const auto& element : value) {
                if (!validate_value(*schema.items, element)) return false;
            }
        }
    }
    if (schema.kind == SchemaKind::kObject) {
        for (const auto& name : schema.required) {
            if (!value.contains(name)) return false;
        }
        for (const auto& [key, element] : value.items()) {
            const SchemaNode* prop = schema.property(key);
            if (prop == nullptr) {
                if (!schema.additional_properties_allowed) return false;
                continue;
            }
            if (!validate_value(*prop, element)) return false;
        }
    }
    return true;
}

bool is_quantity_schema(const SchemaNode& node) {
    if (node.kind != SchemaKind::kString && node.kind != SchemaKind::kAny) return false;
    if (node.pattern && *node.pattern == "^0x(0|[1-9a-f][0-9a-f]*)$") return true;
    if (node.title) {
        std::string lower = *node.title;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        if (lower.find("unsigned integer") != std::string::npos || lower.find("quantity") != std::string::npos ||
            lower.find("block number") != std::string::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace specdiff
