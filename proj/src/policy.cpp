// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/policy.hpp"

#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    std::regex icase(const std::string& pattern) {
        return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
    }

    RuleTableClassifier::Rule rule(std::optional<std::string> method, std::optional<std::string> field,
                                   std::optional<std::string> text, ConsistencyPolicy policy, bool environmental) {
        RuleTableClassifier::Rule r;
        if (method) r.method = icase(*method);
        if (field) r.field = icase(*field);
        if (text) r.text = icase(*text);
        r.policy = policy;
        r.environmental = environmental;
        return r;
    }

    struct Walker {
        const MethodSpec& method;
        PolicyClassifier& classifier;
        std::vector<PolicyAssignment>& audit;

        SchemaPtr walk(const SchemaPtr& node, const std::string& path, const std::string& field_name,
                       std::optional<ConsistencyPolicy> inherited, bool inherited_env) {
            const bool annotated = node->consistency_policy.has_value();
            if (annotated) {
                inherited = node->consistency_policy;
                inherited_env = node->environmental;
            }
            if (!node->has_children()) {
                if (annotated) {
                    audit.push_back({path, *node->consistency_policy, node->environmental, true});
                    return node;
                }
                SchemaNode copy = *node;
                if (inherited) {
                    copy.consistency_policy = inherited;
                    copy.environmental = inherited_env;
                } else {
                    FieldContext context{method.name, method.summary, path, field_name, node.get()};
                    PolicyDecision decision;
                    try {
                        decision = classifier.classify(context);
                    } catch (const Error& e) {
                        throw Error(ErrorCode::kClassifierFailure, "policy classification failed for " + method.name +
                                                                       " at '" + path + "': " + e.what());
                    }
                    copy.consistency_policy = decision.policy.value_or(ConsistencyPolicy::kMustIdentical);
                    copy.environmental =
                        decision.environmental && copy.consistency_policy == ConsistencyPolicy::kMayDivergent;
                }
                audit.push_back({path, *copy.consistency_policy, copy.environmental, false});
                return make_schema(std::move(copy));
            }

            SchemaNode copy = *node;
            for (std::size_t i = 0; i < copy.any_of.size(); ++i) {
                copy.any_of[i] = walk(copy.any_of[i], path + "/anyOf/" + std::to_string(i), field_name, inherited,
                                      inherited_env);
            }
            for (auto& prop : copy.properties) {
                prop.schema = walk(prop.schema, path + "/" + prop.name, prop.name, inherited, inherited_env);
            }
            if (copy.items) copy.items = walk(copy.items, path + "/*", field_name, inherited, inherited_env);
            return make_schema(std::move(copy));
        }
    };

}  // namespace

RuleTableClassifier::RuleTableClassifier() {
    using P = ConsistencyPolicy;
    rules_ = {
        // Instance identity: differs by construction on every node.
        rule(std::nullopt, "^(peer_?id|enr|node_?id|p2p_addresses|discovery_addresses|client_?version)$",
             std::nullopt, P::kMustDivergent, false),
        rule(std::nullopt, std::nullopt, "peer.s public key|node identity|client version|client software",
             P::kMustDivergent, false),
        rule("^web3_clientVersion$", std::nullopt, std::nullopt, P::kMustDivergent, false),
        // Local node state.
        rule("syncing", std::nullopt, std::nullopt, P::kMayDivergent, true),
        rule(std::nullopt, "^(is_syncing|sync_distance|is_optimistic|el_offline|currentBlock|highestBlock|startingBlock)$",
             std::nullopt, P::kMayDivergent, true),
        rule("^getPeers?$", "^(state|direction|last_seen_p2p_address|count)$", std::nullopt, P::kMayDivergent, true),
        rule("identity", "^(seq_number|attnets|syncnets)$", std::nullopt, P::kMayDivergent, true),
        rule(std::nullopt, std::nullopt, "local node|node-specific|peer count", P::kMayDivergent, true),
    };
}

RuleTableClassifier RuleTableClassifier::from_json(const json& document) {
    std::vector<Rule> rules;
    if (!document.is_object() || !document.contains("rules") || !document["rules"].is_array()) {
        throw Error(ErrorCode::kConfig, "rule table must be an object with a \"rules\" array");
    }
    for (const auto& entry : document["rules"]) {
        auto text_of = [&](const char* key) -> std::optional<std::string> {
            if (!entry.contains(key)) return std::nullopt;
            return entry[key].get<std::string>();
        };
        auto policy = policy_from_string(entry.value("policy", ""));
        if (!policy) throw Error(ErrorCode::kConfig, "rule without a valid policy: " + entry.dump());
        rules.push_back(rule(text_of("method"), text_of("field"), text_of("text"), *policy,
                             entry.value("environmental", false)));
    }
    return RuleTableClassifier(std::move(rules));
}

PolicyDecision RuleTableClassifier::classify(const FieldContext& field) {
    std::string text;
    if (field.node) {
        if (field.node->title) text += *field.node->title;
        if (field.node->description) text += " " + *field.node->description;
    }
    for (const auto& r : rules_) {
        if (r.method && !std::regex_search(field.method, *r.method)) continue;
        if (r.field && !std::regex_search(field.field_name, *r.field)) continue;
        if (r.text && !std::regex_search(text, *r.text)) continue;
        return {r.policy, r.environmental};
    }
    return {};
}

AnnotationResult annotate_policies(const ApiSpec& spec, PolicyClassifier& classifier) {
    AnnotationResult result;
    result.spec.source_label = spec.source_label;
    result.spec.title = spec.title;
    for (const auto& [name, method] : spec.methods) {
        auto& audit = result.audit[name];
        Walker walker{method, classifier, audit};
        MethodSpec annotated = method;
        annotated.result = walker.walk(method.result, "", method.result_name, std::nullopt, false);
        result.spec.methods.emplace(name, std::move(annotated));
    }
    return result;
}

json audit_to_json(const AnnotationResult& result) {
    json out = json::object();
    for (const auto& [method, leaves] : result.audit) {
        json entries = json::array();
        for (const auto& leaf : leaves) {
            json entry = {{"path", leaf.path.empty() ? "/" : leaf.path}, {"policy", to_string(leaf.policy)}};
            if (leaf.environmental) entry["environmental"] = true;
            if (leaf.preserved) entry["preserved"] = true;
            entries.push_back(std::move(entry));
        }
        out[method] = std::move(entries);
    }
    return out;
}

}  // namespace specdiff
