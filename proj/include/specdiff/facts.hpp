// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specdiff/request.hpp"
#include "specdiff/rng.hpp"

namespace specdiff {

struct Endpoint;

// Where one semantic parameter type can be harvested from.
struct FactRule {
    std::string param_type;
    Layer layer = Layer::kExecution;
    std::string source_method;
    // JSON-RPC params or, for REST sources, the request path. Strings of the
    // form "${type}" are replaced by facts already extracted for that type.
    json source_params = json::array();
    std::optional<std::string> source_path;
    // REST sources only; a POST sends source_params as the body.
    std::string source_verb = "GET";
    // JSON pointer into the response; a "*" segment fans out over an array.
    std::string extraction_path;
    std::optional<std::string> post_transform;  // "hex_to_int" | "dec_to_int" | "slot_to_epoch"
    // How many earlier facts to substitute into "${type}" placeholders.
    std::uint32_t fan_out = 1;
};

std::vector<FactRule> rules_from_json(const json& document);
json rules_to_json(const std::vector<FactRule>& rules);

// Built-in rule table (data/fact_rules.json compiled in).
std::vector<FactRule> default_fact_rules();

// Live-state cache used to make generated requests semantically valid.
class FactStore {
  public:
    void add(const std::string& param_type, const json& value, std::int64_t captured_at = 0);

    const std::vector<json>* facts(const std::string& param_type) const;
    bool empty() const { return facts_.empty(); }
    const std::map<std::string, std::vector<json>>& all() const { return facts_; }

    std::optional<std::uint64_t> current_slot() const { return current_slot_; }
    std::optional<std::uint64_t> current_block() const { return current_block_; }
    std::optional<std::uint64_t> current_epoch() const;
    void set_current_slot(std::uint64_t slot) { current_slot_ = slot; }
    void set_current_block(std::uint64_t block) { current_block_ = block; }

    json to_json() const;
    static FactStore from_json(const json& document);

  private:
    std::map<std::string, std::vector<json>> facts_;
    std::map<std::string, std::int64_t> captured_at_;
    std::optional<std::uint64_t> current_slot_;
    std::optional<std::uint64_t> current_block_;
};

inline constexpr std::uint64_t kSlotsPerEpoch = 32;

// Types whose mutation is a uniform draw in [1, anchor].
bool is_range_type(const std::string& param_type);

// Performs one auxiliary call for a rule; returns the parsed response body or
// nullopt on failure.
class FactSource {
  public:
    virtual ~FactSource() = default;
    virtual std::optional<json> call(const FactRule& rule, const json& params,
                                     const std::optional<std::string>& path) = 0;
};

struct FactExtraction {
    FactStore store;
    std::vector<std::string> failures;  // one line per failed rule
};

// Runs every rule in order against `source`. Individual failures are
// recorded; throws kEmptyFactStore only when rules exist and all failed.
FactExtraction extract_facts(const std::vector<FactRule>& rules, FactSource& source);

// Same, against a live endpoint over HTTP.
FactExtraction extract_facts(const std::vector<FactRule>& rules, const Endpoint& endpoint);

// Semantically plausible value for `param_type`: range types draw from
// [1, anchor]; identifier types return a stored fact verbatim.
// Throws kMissingAnchor.
json mutate_semantic(const std::string& param_type, const FactStore& store, Rng& rng);

// Replaces every param with a semantic_type binding by a fact, re-encoded to
// fit the param schema. Returns the request unchanged (still syntactic_valid,
// with a provenance notice) when no bound param could be filled.
TestRequest enrich(const TestRequest& request, const MethodSpec& method, const FactStore& store, Rng& rng);

// Re-encodes an integer/hex/decimal fact so it satisfies `schema`.
std::optional<json> fit_to_schema(const json& value, const SchemaNode& schema);

}  // namespace specdiff
