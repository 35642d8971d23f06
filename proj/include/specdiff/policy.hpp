// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "specdiff/spec.hpp"

namespace specdiff {

// What a classifier sees for one leaf of a result schema.
struct FieldContext {
    std::string method;
    std::optional<std::string> summary;
    std::string path;        // "/data/peer_id", "" for the result root
    std::string field_name;  // last property name, or the result name at the root
    const SchemaNode* node = nullptr;
};

struct PolicyDecision {
    std::optional<ConsistencyPolicy> policy;  // nullopt: no opinion, default applies
    bool environmental = false;
};

class PolicyClassifier {
  public:
    virtual ~PolicyClassifier() = default;
    // Throws Error(kClassifierFailure) when a field cannot be classified.
    virtual PolicyDecision classify(const FieldContext& field) = 0;
};

// Keyword rules over method name, field name and field text. First match wins.
class RuleTableClassifier : public PolicyClassifier {
  public:
    struct Rule {
        std::optional<std::regex> method;
        std::optional<std::regex> field;
        std::optional<std::regex> text;  // matched against title + description
        ConsistencyPolicy policy = ConsistencyPolicy::kMustIdentical;
        bool environmental = false;
    };

    RuleTableClassifier();  // built-in table
    explicit RuleTableClassifier(std::vector<Rule> rules) : rules_(std::move(rules)) {}

    // {"rules": [{"method": re, "field": re, "text": re, "policy": "...", "environmental": bool}]}
    static RuleTableClassifier from_json(const json& document);

    PolicyDecision classify(const FieldContext& field) override;

  private:
    std::vector<Rule> rules_;
};

struct PolicyAssignment {
    std::string path;
    ConsistencyPolicy policy;
    bool environmental = false;
    bool preserved = false;  // already present in the document
};

struct AnnotationResult {
    ApiSpec spec;
    std::map<std::string, std::vector<PolicyAssignment>> audit;  // method -> leaves
};

// Attaches a ConsistencyPolicy to every leaf of every result schema. Existing
// annotations are kept; unlabeled leaves under an annotated ancestor inherit
// it; leaves the classifier leaves unlabeled default to must-identical.
AnnotationResult annotate_policies(const ApiSpec& spec, PolicyClassifier& classifier);

json audit_to_json(const AnnotationResult& result);

}  // namespace specdiff
