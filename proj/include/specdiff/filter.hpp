// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specdiff/diff.hpp"
#include "specdiff/harness.hpp"
#include "specdiff/oracle.hpp"

namespace specdiff {

enum class VerdictValue { kGenuineBug, kFpEnvironmental, kFpAllowed, kFpSemanticEquivalent };

std::string_view to_string(VerdictValue value);

inline constexpr std::string_view kOracleUnavailableReason = "oracle unavailable — conservative";

struct Verdict {
    VerdictValue value = VerdictValue::kGenuineBug;
    std::string reason;
    bool oracle_used = false;
};

json verdict_to_json(const Verdict& verdict);

struct Finding {
    TestRequest request;
    std::vector<ResponseRecord> records;
    std::vector<Divergence> divergences;
    std::vector<Verdict> verdicts;  // parallel to divergences

    bool genuine() const;
};

struct ClassifyContext {
    const ReadinessReport* readiness = nullptr;  // for syncing endpoints; may be null
};

// The verdict reachable without an oracle, if any.
std::optional<Verdict> deterministic_verdict(const Divergence& divergence, const ClassifyContext& context);

OracleQuery oracle_query_for(const std::string& method, const Divergence& divergence);

// Full decision for one divergence; oracle failures become genuine bugs.
Verdict classify(const std::string& method, const Divergence& divergence, const ClassifyContext& context,
                 EquivalenceOracle& oracle);

struct FilterOptions {
    bool enabled = true;
    std::uint32_t oracle_parallelism = 4;
};

struct FilterResult {
    std::vector<Finding> findings;  // requests with at least one divergence
    std::map<VerdictValue, std::size_t> counts;
    std::size_t oracle_queries = 0;
};

// Diffs and classifies every entry of a round. Identical oracle questions
// are asked once; answers are independent of scheduling.
FilterResult filter_round(const RoundLog& log, const ApiSpec& spec, EquivalenceOracle& oracle,
                          const FilterOptions& options = {});

// One report line per (method, field_path, kind, policy) of genuine divergences.
struct ReportEntry {
    std::string method;
    std::string field_path;
    DivergenceKind kind = DivergenceKind::kValueMismatch;
    ConsistencyPolicy policy = ConsistencyPolicy::kMustIdentical;
    std::size_t occurrences = 0;
    std::size_t first_finding = 0;  // index into FilterResult::findings
    std::string reason;
};

std::vector<ReportEntry> dedup_findings(const std::vector<Finding>& findings);

// FP / (TP + FP) * 100. Throws kUndefinedRate when tp + fp = 0.
double compute_fdr(std::uint64_t tp, std::uint64_t fp);

}  // namespace specdiff
