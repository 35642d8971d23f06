// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/facts.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>

#include "specdiff/embedded_data.hpp"
#include "specdiff/endpoint.hpp"
#include "specdiff/error.hpp"
#include "specdiff/http.hpp"

namespace specdiff {

namespace {

    std::int64_t now_ms() {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }

    std::optional<std::uint64_t> parse_unsigned(std::string_view text, int base) {
        if (text.empty()) return std::nullopt;
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
        if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
        return value;
    }

    std::optional<std::uint64_t> as_unsigned(const json& value) {
        if (value.is_number_unsigned()) return value.get<std::uint64_t>();
        if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::uint64_t>();
        if (value.is_string()) {
            const auto& text = value.get_ref<const std::string&>();
            if (text.starts_with("0x")) return parse_unsigned(std::string_view(text).substr(2), 16);
            return parse_unsigned(text, 10);
        }
        return std::nullopt;
    }

    std::string to_hex(std::uint64_t value) {
        static constexpr char kDigits[] = "0123456789abcdef";
        if (value == 0) return "0x0";
        std::string digits;
        while (value > 0) {
            digits.push_back(kDigits[value & 0xF]);
            value >>= 4;
        }
        std::reverse(digits.begin(), digits.end());
        return "0x" + digits;
    }

    // Collects every value addressed by a pointer whose segments may be "*".
    void collect(const json& node, const std::vector<std::string>& segments, std::size_t index, std::vector<json>& out) {
        if (index == segments.size()) {
            if (!node.is_null()) out.push_back(node);
            return;
        }
        const auto& segment = segments[index];
        if (segment == "*") {
            if (node.is_array()) {
                for (const auto& element : node) collect(element, segments, index + 1, out);
            } else if (node.is_object()) {
                for (const auto& [_, element] : node.items()) collect(element, segments, index + 1, out);
            }
            return;
        }
        if (node.is_object()) {
            auto it = node.find(segment);
            if (it != node.end()) collect(*it, segments, index + 1, out);
        } else if (node.is_array()) {
            if (auto position = parse_unsigned(segment, 10); position && *position < node.size()) {
                collect(node[*position], segments, index + 1, out);
            }
        }
    }

    std::vector<std::string> split_pointer(const std::string& pointer) {
        std::vector<std::string> segments;
        std::size_t pos = pointer.starts_with("/") ? 1 : 0;
        if (pointer.empty() || pointer == "/") return segments;
        while (true) {
            const auto next = pointer.find('/', pos);
            segments.push_back(pointer.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return segments;
    }

    std::optional<std::string> placeholder_type(const std::string& text) {
        const auto open = text.find("${");
        if (open == std::string::npos) return std::nullopt;
        const auto close = text.find('}', open);
        if (close == std::string::npos) return std::nullopt;
        return text.substr(open + 2, close - open - 2);
    }

    std::string fact_text(const json& fact) { return fact.is_string() ? fact.get<std::string>() : fact.dump(); }

    json substitute(const json& node, const std::string& type, const json& fact) {
        if (node.is_string()) {
            const auto& text = node.get_ref<const std::string&>();
            const std::string token = "${" + type + "}";
            if (text == token) return fact;
            auto pos = text.find(token);
            if (pos == std::string::npos) return node;
            return text.substr(0, pos) + fact_text(fact) + text.substr(pos + token.size());
        }
        if (node.is_array() || node.is_object()) {
            json copy = node;
            for (auto& element : copy) element = substitute(element, type, fact);
            return copy;
        }
        return node;
    }

    std::optional<std::string> find_placeholder(const json& node) {
        if (node.is_string()) return placeholder_type(node.get<std::string>());
        if (node.is_array() || node.is_object()) {
            for (const auto& element : node) {
                if (auto type = find_placeholder(element)) return type;
            }
        }
        return std::nullopt;
    }

    std::optional<std::uint64_t> max_anchor(const FactStore& store, auto&& matches) {
        std::optional<std::uint64_t> best;
        for (const auto& [type, values] : store.all()) {
            if (!matches(type)) continue;
            for (const auto& value : values) {
                if (auto n = as_unsigned(value)) best = std::max(best.value_or(0), *n);
            }
        }
        return best;
    }

    bool is_slot_type(const std::string& type) { return type == "slot" || type.ends_with(".slot"); }

    class EndpointFactSource : public FactSource {
      public:
        explicit EndpointFactSource(const Endpoint& endpoint) : endpoint_(endpoint) {}

        std::optional<json> call(const FactRule& rule, const json& params,
                                 const std::optional<std::string>& path) override {
            http::Result result;
            if (rule.layer == Layer::kExecution) {
                const json body = {{"id", 1}, {"jsonrpc", "2.0"}, {"method", rule.source_method}, {"params", params}};
                result = http::send(endpoint_.base_url, "POST", "/", body.dump(), endpoint_.timeout_ms);
            } else if (rule.source_verb == "POST") {
                result = http::send(endpoint_.base_url, "POST", path.value_or("/"), params.dump(), endpoint_.timeout_ms);
            } else {
                result = http::send(endpoint_.base_url, "GET", path.value_or("/"), {}, endpoint_.timeout_ms);
            }
            if (!result.response || result.response->status != 200) return std::nullopt;
            auto parsed = json::parse(result.response->body, nullptr, false);
            if (parsed.is_discarded() || (parsed.is_object() && parsed.contains("error"))) return std::nullopt;
            return parsed;
        }

      private:
        const Endpoint& endpoint_;
    };

}  // namespace

std::vector<FactRule> rules_from_json(const json& document) {
    if (!document.is_array()) throw Error(ErrorCode::kConfig, "fact-rule file must be a JSON array");
    std::vector<FactRule> rules;
    for (const auto& entry : document) {
        try {
            FactRule rule;
            rule.param_type = entry.at("param_type").get<std::string>();
            if (rule.param_type.empty()) throw Error(ErrorCode::kConfig, "fact rule with empty param_type");
            auto layer = layer_from_string(entry.at("layer").get<std::string>());
            if (!layer) throw Error(ErrorCode::kConfig, "fact rule layer must be EL or CL");
            rule.layer = *layer;
            rule.source_method = entry.at("source_method").get<std::string>();
            rule.source_params = entry.value("source_params", json::array());
            if (entry.contains("source_path")) rule.source_path = entry["source_path"].get<std::string>();
            rule.extraction_path = entry.at("extraction_path").get<std::string>();
            if (entry.contains("post_transform")) {
                rule.post_transform = entry["post_transform"].get<std::string>();
                if (*rule.post_transform != "hex_to_int" && *rule.post_transform != "dec_to_int" &&
                    *rule.post_transform != "slot_to_epoch") {
                    throw Error(ErrorCode::kConfig, "unknown post_transform " + *rule.post_transform);
                }
            }
            rule.source_verb = entry.value("source_verb", "GET");
            rule.fan_out = entry.value("fan_out", 1U);
            rules.push_back(std::move(rule));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::kConfig, std::string("malformed fact rule: ") + e.what());
        }
    }
    return rules;
}

json rules_to_json(const std::vector<FactRule>& rules) {
    json out = json::array();
    for (const auto& rule : rules) {
        json entry = {{"param_type", rule.param_type},
                      {"layer", to_string(rule.layer)},
                      {"source_method", rule.source_method},
                      {"source_params", rule.source_params},
                      {"extraction_path", rule.extraction_path},
                      {"fan_out", rule.fan_out}};
        if (rule.source_path) entry["source_path"] = *rule.source_path;
        if (rule.post_transform) entry["post_transform"] = *rule.post_transform;
        if (rule.layer == Layer::kConsensus) entry["source_verb"] = rule.source_verb;
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<FactRule> default_fact_rules() { return rules_from_json(json::parse(embedded::kFactRules)); }

void FactStore::add(const std::string& param_type, const json& value, std::int64_t captured_at) {
    auto& values = facts_[param_type];
    if (std::find(values.begin(), values.end(), value) == values.end()) values.push_back(value);
    captured_at_[param_type] = captured_at;
    if (param_type == "block_number") {
        if (auto n = as_unsigned(value)) current_block_ = std::max(current_block_.value_or(0), *n);
    } else if (is_slot_type(param_type)) {
        if (auto n = as_unsigned(value)) current_slot_ = std::max(current_slot_.value_or(0), *n);
    }
}

const std::vector<json>* FactStore::facts(const std::string& param_type) const {
    auto it = facts_.find(param_type);
    return it == facts_.end() ? nullptr : &it->second;
}

std::optional<std::uint64_t> FactStore::current_epoch() const {
    if (auto from_facts = max_anchor(*this, [](const std::string& t) { return t == "epoch"; })) return from_facts;
    if (current_slot_) return *current_slot_ / kSlotsPerEpoch;
    return std::nullopt;
}

json FactStore::to_json() const {
    json out = {{"facts", facts_}};
    if (current_slot_) out["current_slot"] = *current_slot_;
    if (current_block_) out["current_block"] = *current_block_;
    return out;
}

FactStore FactStore::from_json(const json& document) {
    FactStore store;
    const json stored = document.value("facts", json::object());
    for (const auto& [type, values] : stored.items()) {
        for (const auto& value : values) store.add(type, value);
    }
    if (document.contains("current_slot")) store.current_slot_ = document["current_slot"].get<std::uint64_t>();
    if (document.contains("current_block")) store.current_block_ = document["current_block"].get<std::uint64_t>();
    return store;
}

bool is_range_type(const std::string& param_type) {
    return param_type == "block_number" || param_type == "epoch" || is_slot_type(param_type);
}

FactExtraction extract_facts(const std::vector<FactRule>& rules, FactSource& source) {
    FactExtraction extraction;
    std::size_t succeeded = 0;
    bool any_cl = false;
    for (const auto& rule : rules) {
        std::vector<std::pair<json, std::optional<std::string>>> calls;
        const json path_holder = rule.source_path ? json(*rule.source_path) : json();
        auto dependency = find_placeholder(rule.source_params);
        if (!dependency) dependency = find_placeholder(path_holder);
        if (dependency) {
            const auto* facts = extraction.store.facts(*dependency);
            if (facts == nullptr) {
                extraction.failures.push_back(rule.param_type + " via " + rule.source_method + ": no facts of type " +
                                              *dependency + " to substitute");
                continue;
            }
            const auto count = std::min<std::size_t>(facts->size(), std::max<std::uint32_t>(rule.fan_out, 1));
            for (std::size_t i = 0; i < count; ++i) {
                json path = substitute(path_holder, *dependency, (*facts)[i]);
                calls.emplace_back(substitute(rule.source_params, *dependency, (*facts)[i]),
                                   path.is_string() ? std::optional(path.get<std::string>()) : std::nullopt);
            }
        } else {
            calls.emplace_back(rule.source_params, rule.source_path);
        }

        const auto segments = split_pointer(rule.extraction_path);
        std::size_t added = 0;
        for (const auto& [params, path] : calls) {
            auto body = source.call(rule, params, path);
            if (!body) continue;
            std::vector<json> values;
            collect(*body, segments, 0, values);
            for (auto value : values) {
                if (rule.post_transform) {
                    auto n = as_unsigned(value);
                    if (!n) continue;
                    value = *rule.post_transform == "slot_to_epoch" ? *n / kSlotsPerEpoch : *n;
                }
                extraction.store.add(rule.param_type, value, now_ms());
                ++added;
            }
        }
        if (added == 0) {
            extraction.failures.push_back(rule.param_type + " via " + rule.source_method + ": no values extracted");
            continue;
        }
        ++succeeded;
        any_cl = any_cl || rule.layer == Layer::kConsensus;
    }
    if (!rules.empty() && succeeded == 0) {
        throw Error(ErrorCode::kEmptyFactStore, "every fact rule failed; semantic generation must degrade");
    }
    if (any_cl && !extraction.store.current_slot()) {
        extraction.failures.push_back("consensus facts present but no slot anchor was extracted");
    }
    return extraction;
}

FactExtraction extract_facts(const std::vector<FactRule>& rules, const Endpoint& endpoint) {
    EndpointFactSource source(endpoint);
    std::vector<FactRule> applicable;
    std::copy_if(rules.begin(), rules.end(), std::back_inserter(applicable),
                 [&](const FactRule& r) { return r.layer == endpoint.layer; });
    return extract_facts(applicable, source);
}

json mutate_semantic(const std::string& param_type, const FactStore& store, Rng& rng) {
    if (is_range_type(param_type)) {
        std::optional<std::uint64_t> anchor;
        if (param_type == "block_number") {
            anchor = store.current_block();
        } else if (param_type == "epoch") {
            anchor = store.current_epoch();
        } else {
            anchor = store.current_slot();
        }
        if (!anchor || *anchor == 0) {
            throw Error(ErrorCode::kMissingAnchor, "no current-state anchor for " + param_type);
        }
        return rng.uniform(1, *anchor);
    }
    const auto* facts = store.facts(param_type);
    if (facts == nullptr || facts->empty()) {
        throw Error(ErrorCode::kMissingAnchor, "no stored facts for " + param_type);
    }
    return (*facts)[rng.index(facts->size())];
}

std::optional<json> fit_to_schema(const json& value, const SchemaNode& schema) {
    std::vector<json> candidates{value};
    if (auto n = as_unsigned(value)) {
        candidates.push_back(to_hex(*n));
        candidates.push_back(std::to_string(*n));
        candidates.push_back(*n);
    }
    for (const auto& candidate : candidates) {
        if (validate_value(schema, candidate)) return candidate;
    }
    return std::nullopt;
}

TestRequest enrich(const TestRequest& request, const MethodSpec& method, const FactStore& store, Rng& rng) {
    TestRequest out = request;
    std::size_t replaced = 0;
    for (const auto& param : method.params) {
        if (!param.semantic_type || !out.args.contains(param.name)) continue;
        json fact;
        try {
            fact = mutate_semantic(*param.semantic_type, store, rng);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kMissingAnchor) throw;
            out.provenance.push_back(param.name + ": no facts for " + *param.semantic_type);
            continue;
        }
        auto fitted = fit_to_schema(fact, *param.schema);
        if (!fitted) {
            out.provenance.push_back(param.name + ": fact " + fact.dump() + " does not fit the schema");
            continue;
        }
        out.args[param.name] = *fitted;
        const char* how = is_range_type(*param.semantic_type) ? "mutated in [1, current]" : "stored fact";
        out.provenance.push_back(param.name + " <- " + *param.semantic_type + " (" + how + ")");
        ++replaced;
    }
    if (replaced == 0) {
        out.provenance.push_back("degraded: no applicable facts, kept syntactic_valid");
        return out;
    }
    out.validity = Validity::kSemanticValid;
    build_wire(out, method);
    return out;
}

}  // namespace specdiff
