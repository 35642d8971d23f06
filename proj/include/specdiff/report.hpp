// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specdiff/filter.hpp"
#include "specdiff/mock.hpp"

namespace specdiff {

// A method whose well-formed requests every endpoint rejected as invalid.
// Points at the spec rather than at any one client.
struct SpecDefect {
    std::string method;
    std::size_t requests = 0;
    std::vector<std::string> messages;  // distinct rejection messages, sorted
};

std::vector<SpecDefect> suspected_spec_defects(const RoundLog& log);

// True for HTTP 400/422 and JSON-RPC -32600/-32602 answers.
bool is_validation_rejection(const ResponseRecord& record);

// Ground-truth scoring against labeled injections ("genuine" or "benign").
struct LabeledMetrics {
    std::size_t tp = 0;            // genuine injections with a reported entry
    std::size_t fp = 0;            // benign injections reported + unattributed entries
    std::size_t unattributed = 0;  // reported entries no injection explains
    std::size_t reported = 0;      // deduplicated entries
    std::optional<double> fdr;     // nullopt when tp + fp = 0
    std::vector<std::string> missed;  // genuine injections with no entry
};

struct Metrics {
    LabeledMetrics with_filter;
    LabeledMetrics without_filter;
};

// `node_of` maps endpoint ids to mock node indices.
LabeledMetrics score_findings(const std::vector<Finding>& findings, const std::vector<mock::Injection>& injections,
                              const std::map<int, int>& node_of);

struct RunReport {
    json metadata;  // seed, mix, fleet labels, specs, oracle mode, generated_at
    std::optional<ReadinessReport> readiness;
    std::map<std::string, std::size_t> request_counts;
    std::vector<Finding> findings;  // every divergent request, classified
    std::vector<ReportEntry> entries;
    std::map<VerdictValue, std::size_t> verdict_counts;
    std::size_t oracle_queries = 0;
    std::vector<SpecDefect> spec_defects;
    std::optional<Metrics> metrics;
    std::vector<std::string> warnings;
    std::map<int, std::string> endpoint_labels;
    std::optional<json> replay;  // record changes against a replayed log

    bool has_genuine() const { return !entries.empty() || !spec_defects.empty(); }
};

// Stable key order; latencies are left out so reruns compare byte for byte
// once "generated_at" is removed.
json report_to_json(const RunReport& report);
std::string report_to_markdown(const RunReport& report);

// Writes run_report.json and run_report.md under `dir` (created if needed).
void write_report(const RunReport& report, const std::string& dir);

}  // namespace specdiff
