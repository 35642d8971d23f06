// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/diff.hpp"

#include <algorithm>
#include <set>

namespace specdiff {

namespace {

    struct KindName {
        DivergenceKind kind;
        std::string_view name;
    };

    constexpr KindName kKindNames[] = {
        {DivergenceKind::kValueMismatch, "value_mismatch"}, {DivergenceKind::kMissingField, "missing_field"},
        {DivergenceKind::kExtraField, "extra_field"},       {DivergenceKind::kTypeMismatch, "type_mismatch"},
        {DivergenceKind::kStatusMismatch, "status_mismatch"}, {DivergenceKind::kAvailability, "availability"},
    };

    using Values = std::vector<std::pair<int, std::optional<json>>>;

    struct Inherited {
        std::optional<ConsistencyPolicy> policy;
        bool environmental = false;
    };

    std::string escape_token(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    // JSON type category used for type_mismatch; integers and floats are both numbers.
    int category(const json& value) {
        if (value.is_null()) return 0;
        if (value.is_boolean()) return 1;
        if (value.is_number()) return 2;
        if (value.is_string()) return 3;
        if (value.is_array()) return 4;
        return 5;
    }

    const json* first_present(const Values& values) {
        for (const auto& [_, value] : values) {
            if (value) return &*value;
        }
        return nullptr;
    }

    SchemaPtr resolve_branch(SchemaPtr node, const Values& values, Inherited& inherited) {
        while (node && !node->any_of.empty()) {
            if (node->consistency_policy) inherited = {node->consistency_policy, node->environmental};
            const json* sample = first_present(values);
            SchemaPtr chosen;
            if (sample != nullptr) {
                for (const auto& branch : node->any_of) {
                    if (validate_value(*branch, *sample)) {
                        chosen = branch;
                        break;
                    }
                }
                for (const auto& branch : node->any_of) {
                    if (chosen) break;
                    if (json_matches_kind(branch->kind, *sample)) chosen = branch;
                }
            }
            node = chosen ? chosen : node->any_of.front();
        }
        if (node && node->consistency_policy) inherited = {node->consistency_policy, node->environmental};
        return node;
    }

    void collect_policies(const SchemaNode& node, std::set<std::pair<ConsistencyPolicy, bool>>& out, int depth) {
        if (depth > 32) return;
        if (node.consistency_policy) {
            out.emplace(*node.consistency_policy, node.environmental);
            return;
        }
        for (const auto& branch : node.any_of) collect_policies(*branch, out, depth + 1);
        for (const auto& property : node.properties) collect_policies(*property.schema, out, depth + 1);
        if (node.items) collect_policies(*node.items, out, depth + 1);
    }

    // Composite paths take their own annotation, an inherited one, or the
    // common policy of their leaves; mixed leaves fall back to must-identical.
    void attach_policy(Divergence& divergence, const SchemaPtr& node, const Inherited& inherited) {
        if (inherited.policy) {
            divergence.policy = *inherited.policy;
            divergence.environmental = inherited.environmental;
            return;
        }
        if (node) {
            std::set<std::pair<ConsistencyPolicy, bool>> found;
            collect_policies(*node, found, 0);
            if (found.size() == 1) {
                divergence.policy = found.begin()->first;
                divergence.environmental = found.begin()->second;
                return;
            }
        }
        divergence.policy = ConsistencyPolicy::kMustIdentical;
        divergence.environmental = false;
    }

    bool multiset_equal(const json& a, const json& b) {
        if (a.size() != b.size()) return false;
        std::vector<std::string> left;
        std::vector<std::string> right;
        for (const auto& e : a) left.push_back(e.dump());
        for (const auto& e : b) right.push_back(e.dump());
        std::sort(left.begin(), left.end());
        std::sort(right.begin(), right.end());
        return left == right;
    }

    void walk(const std::string& path, const Values& values, SchemaPtr node, Inherited inherited,
              bool declared, std::vector<Divergence>& out) {
        const SchemaPtr unresolved = node;
        node = resolve_branch(node, values, inherited);

        auto emit = [&](DivergenceKind kind, const SchemaPtr& at) {
            Divergence divergence;
            divergence.field_path = path;
            divergence.kind = kind;
            for (const auto& [id, value] : values) divergence.values[id] = value;
            divergence.schema = at;
            attach_policy(divergence, at, inherited);
            out.push_back(std::move(divergence));
        };

        std::size_t present = 0;
        for (const auto& [_, value] : values) present += value ? 1 : 0;
        if (present == 0) return;
        if (present < values.size()) {
            const bool majority = 2 * present >= values.size();
            emit(declared || majority ? DivergenceKind::kMissingField : DivergenceKind::kExtraField, node);
            return;
        }

        const int kind = category(*values.front().second);
        for (const auto& [_, value] : values) {
            if (category(*value) != kind) {
                emit(DivergenceKind::kTypeMismatch, unresolved);
                return;
            }
        }

        if (kind == 5) {
            std::set<std::string> keys;
            for (const auto& [_, value] : values) {
                for (const auto& [key, __] : value->items()) keys.insert(key);
            }
            for (const auto& key : keys) {
                Values children;
                for (const auto& [id, value] : values) {
                    auto it = value->find(key);
                    children.emplace_back(id, it == value->end() ? std::nullopt : std::optional<json>(*it));
                }
                const SchemaNode* parent = node.get();
                SchemaPtr child;
                if (parent != nullptr) {
                    for (const auto& property : parent->properties) {
                        if (property.name == key) child = property.schema;
                    }
                }
                walk(path + "/" + escape_token(key), children, child, inherited, child != nullptr, out);
            }
            return;
        }

        if (kind == 4) {
            if (node && node->unordered) {
                for (const auto& [_, value] : values) {
                    if (!multiset_equal(*values.front().second, *value)) {
                        emit(DivergenceKind::kValueMismatch, node);
                        return;
                    }
                }
                return;
            }
            std::size_t longest = 0;
            for (const auto& [_, value] : values) longest = std::max(longest, value->size());
            const SchemaPtr items = node ? node->items : nullptr;
            for (std::size_t i = 0; i < longest; ++i) {
                Values children;
                for (const auto& [id, value] : values) {
                    children.emplace_back(id, i < value->size() ? std::optional<json>((*value)[i]) : std::nullopt);
                }
                walk(path + "/" + std::to_string(i), children, items, inherited, false, out);
            }
            return;
        }

        for (const auto& [_, value] : values) {
            if (*value != *values.front().second) {
                emit(DivergenceKind::kValueMismatch, node);
                return;
            }
        }
    }

    SchemaPtr error_schema() {
        static const SchemaPtr schema = [] {
            SchemaNode code;
            code.kind = SchemaKind::kInteger;
            code.consistency_policy = ConsistencyPolicy::kMustIdentical;
            SchemaNode message;
            message.kind = SchemaKind::kString;
            message.title = "error message";
            message.consistency_policy = ConsistencyPolicy::kMustIdentical;
            SchemaNode data;
            data.consistency_policy = ConsistencyPolicy::kMayDivergent;
            SchemaNode error;
            error.kind = SchemaKind::kObject;
            error.title = "JSON-RPC error object";
            error.properties = {{"code", make_schema(code)}, {"message", make_schema(message)}, {"data", make_schema(data)}};
            error.required = {"code", "message"};
            return make_schema(error);
        }();
        return schema;
    }

    std::optional<std::string> canonical_decimal(const std::string& text) {
        if (text.empty() || text.size() > 256) return std::nullopt;
        if (!std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) return std::nullopt;
        const auto first = text.find_first_not_of('0');
        return first == std::string::npos ? "0" : text.substr(first);
    }

    std::optional<std::string> hex_digits(const std::string& text) {
        if (text.size() < 2 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) return std::nullopt;
        std::string digits = text.substr(2);
        if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isxdigit(c); })) {
            return std::nullopt;
        }
        std::transform(digits.begin(), digits.end(), digits.begin(), [](unsigned char c) { return std::tolower(c); });
        return digits;
    }

}  // namespace

std::string_view to_string(DivergenceKind kind) {
    for (const auto& entry : kKindNames) {
        if (entry.kind == kind) return entry.name;
    }
    return "value_mismatch";
}

std::optional<DivergenceKind> divergence_kind_from_string(std::string_view text) {
    for (const auto& entry : kKindNames) {
        if (entry.name == text) return entry.kind;
    }
    return std::nullopt;
}

json divergence_to_json(const Divergence& divergence) {
    json values = json::object();
    for (const auto& [id, value] : divergence.values) {
        values[std::to_string(id)] = value ? *value : json({{"$absent", true}});
    }
    return {{"field_path", divergence.field_path},
            {"kind", to_string(divergence.kind)},
            {"policy", to_string(divergence.policy)},
            {"environmental", divergence.environmental},
            {"values", values}};
}

SchemaPtr response_schema(const MethodSpec& method) {
    if (is_rest(method.transport)) return method.result;
    SchemaNode version;
    version.kind = SchemaKind::kString;
    version.consistency_policy = ConsistencyPolicy::kMustIdentical;
    SchemaNode id;
    id.consistency_policy = ConsistencyPolicy::kMustIdentical;
    SchemaNode envelope;
    envelope.kind = SchemaKind::kObject;
    envelope.properties = {{"jsonrpc", make_schema(version)},
                           {"id", make_schema(id)},
                           {"result", method.result},
                           {"error", error_schema()}};
    return make_schema(envelope);
}

std::vector<Divergence> diff_records(const std::vector<ResponseRecord>& records, const SchemaPtr& schema) {
    std::vector<Divergence> out;
    if (records.size() < 2) return out;

    const bool any_unavailable = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.unavailable(); });
    if (any_unavailable) {
        const bool all_unavailable = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.unavailable(); });
        if (all_unavailable) return out;
        Divergence divergence;
        divergence.field_path = "/";
        divergence.kind = DivergenceKind::kAvailability;
        for (const auto& record : records) {
            divergence.values[record.endpoint_id] =
                record.unavailable() ? std::nullopt : std::optional<json>(record.body.value_or(json(record.raw_body)));
        }
        divergence.schema = schema;
        out.push_back(std::move(divergence));
        return out;
    }

    std::set<int> statuses;
    for (const auto& record : records) statuses.insert(record.http_status.value_or(0));
    if (statuses.size() > 1) {
        Divergence divergence;
        divergence.field_path = std::string(kStatusPath);
        divergence.kind = DivergenceKind::kStatusMismatch;
        for (const auto& record : records) divergence.values[record.endpoint_id] = json(record.http_status.value_or(0));
        out.push_back(std::move(divergence));
    }

    Values bodies;
    for (const auto& record : records) {
        bodies.emplace_back(record.endpoint_id, record.body ? *record.body : json(record.raw_body));
    }
    walk("", bodies, schema, {}, true, out);
    for (auto& divergence : out) {
        if (divergence.field_path.empty()) divergence.field_path = "/";
    }
    return out;
}

std::vector<Divergence> diff_records(const std::vector<ResponseRecord>& records, const MethodSpec& method) {
    return diff_records(records, response_schema(method));
}

bool canonical_equivalent(const json& a, const json& b, const SchemaNode* schema) {
    if (a.is_string() && b.is_string()) {
        const auto& left = a.get_ref<const std::string&>();
        const auto& right = b.get_ref<const std::string&>();
        if (left == right) return true;
        auto left_hex = hex_digits(left);
        auto right_hex = hex_digits(right);
        if (left_hex && right_hex) {
            if (schema != nullptr && is_quantity_schema(*schema)) {
                auto strip = [](const std::string& digits) {
                    const auto first = digits.find_first_not_of('0');
                    return first == std::string::npos ? std::string("0") : digits.substr(first);
                };
                return strip(*left_hex) == strip(*right_hex);
            }
            return *left_hex == *right_hex;
        }
        auto left_dec = canonical_decimal(left);
        auto right_dec = canonical_decimal(right);
        return left_dec && right_dec && *left_dec == *right_dec;
    }
    if (a.is_object() && b.is_object()) {
        if (a.size() != b.size()) return false;
        for (const auto& [key, value] : a.items()) {
            auto it = b.find(key);
            if (it == b.end()) return false;
            const SchemaNode* child = schema != nullptr ? schema->property(key) : nullptr;
            if (!canonical_equivalent(value, *it, child)) return false;
        }
        return true;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) return false;
        const SchemaNode* items = schema != nullptr ? schema->items.get() : nullptr;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!canonical_equivalent(a[i], b[i], items)) return false;
        }
        return true;
    }
    return a == b;
}

}  // namespace specdiff
