// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specdiff/facts.hpp"
#include "specdiff/filter.hpp"
#include "specdiff/generator.hpp"
#include "specdiff/harness.hpp"
#include "specdiff/mock.hpp"
#include "specdiff/policy.hpp"
#include "specdiff/report.hpp"

namespace specdiff {

std::string read_text_file(const std::string& path);
json read_json_file(const std::string& path);

// Parses and merges spec files (the bundled EL and CL specs when `files` is
// empty), applies an optional semantic-type sidecar, then fills in missing
// consistency policies with `classifier` (the built-in rule table if null).
ApiSpec load_spec(const std::vector<std::string>& files, const std::optional<std::string>& semantic_types = {},
                  PolicyClassifier* classifier = nullptr);

// Facts from the lowest-id endpoint of each layer the spec uses. A layer
// whose rules all fail adds a warning instead of aborting.
FactExtraction harvest_facts(const ApiSpec& spec, const std::vector<Endpoint>& fleet,
                             const std::vector<FactRule>& rules);

// Methods whose layer has at least one endpoint.
ApiSpec servable_subset(const ApiSpec& spec, const std::vector<Endpoint>& fleet, std::vector<std::string>* dropped);

struct RunSettings {
    TestMix mix;
    std::uint64_t seed = 1;
    std::string oracle_mode = "stub_false";
    RoundOptions round;
    FilterOptions filter;
    std::vector<FactRule> fact_rules = default_fact_rules();
    // Labeled injections to score against; metrics are omitted when empty.
    std::vector<mock::Injection> labels;
};

struct RunOutcome {
    RunReport report;
    RoundLog log;
};

// Classifies a finished round and assembles the report.
RunReport analyze_round(const ApiSpec& spec, const RoundLog& log, const std::vector<Endpoint>& fleet,
                        EquivalenceOracle& oracle, const RunSettings& settings);

// facts -> generate -> dispatch -> filter -> report.
RunOutcome run_pipeline(const ApiSpec& spec, const std::vector<Endpoint>& fleet, EquivalenceOracle& oracle,
                        const RunSettings& settings);

// Re-dispatches every logged request to `fleet` and reports record changes
// under "replay". Throws kConfig when the fleet's endpoint ids differ from
// the log's.
RunOutcome replay_round(const ApiSpec& spec, const RoundLog& logged, const std::vector<Endpoint>& fleet,
                        EquivalenceOracle& oracle, const RunSettings& settings);

// Endpoint id -> mock node index, parsed from "node-<i>/..." labels.
std::map<int, int> mock_nodes(const std::vector<Endpoint>& fleet);

}  // namespace specdiff
