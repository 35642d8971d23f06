// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/filter.hpp"

#include <algorithm>
#include <future>
#include <tuple>

#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    struct Pending {
        std::size_t finding;
        std::size_t divergence;
        std::size_t question;
    };

    std::string question_key(const OracleQuery& query) {
        json key = {{"method", query.method}, {"path", query.field_path}, {"schema", query.schema}};
        json responses = json::object();
        for (const auto& [id, value] : query.responses) responses[std::to_string(id)] = value;
        key["responses"] = responses;
        return key.dump();
    }

    Verdict answer_to_verdict(const OracleAnswer& answer) {
        if (answer.semantically_equivalent) return {VerdictValue::kFpSemanticEquivalent, "oracle: " + answer.reason, true};
        return {VerdictValue::kGenuineBug, "oracle: " + answer.reason, true};
    }

    Verdict ask(EquivalenceOracle& oracle, const OracleQuery& query) {
        try {
            return answer_to_verdict(oracle.query(query));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kOracleFailure) throw;
            return {VerdictValue::kGenuineBug, std::string(kOracleUnavailableReason), true};
        }
    }

}  // namespace

std::string_view to_string(VerdictValue value) {
    switch (value) {
        case VerdictValue::kGenuineBug: return "genuine_bug";
        case VerdictValue::kFpEnvironmental: return "fp_environmental";
        case VerdictValue::kFpAllowed: return "fp_allowed";
        case VerdictValue::kFpSemanticEquivalent: return "fp_semantic_equivalent";
    }
    return "genuine_bug";
}

json verdict_to_json(const Verdict& verdict) {
    return {{"value", to_string(verdict.value)}, {"reason", verdict.reason}, {"oracle_used", verdict.oracle_used}};
}

bool Finding::genuine() const {
    return std::any_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.value == VerdictValue::kGenuineBug; });
}

std::optional<Verdict> deterministic_verdict(const Divergence& divergence, const ClassifyContext& context) {
    if (divergence.kind == DivergenceKind::kAvailability) {
        for (const auto& [id, value] : divergence.values) {
            if (!value && context.readiness != nullptr && context.readiness->is_syncing(id)) {
                return Verdict{VerdictValue::kFpEnvironmental, "unavailable endpoint is syncing", false};
            }
        }
        return Verdict{VerdictValue::kGenuineBug, "availability divergence", false};
    }
    if (divergence.policy == ConsistencyPolicy::kMustDivergent) {
        return Verdict{VerdictValue::kFpAllowed, "field is must-divergent", false};
    }
    if (divergence.policy == ConsistencyPolicy::kMayDivergent && divergence.environmental) {
        return Verdict{VerdictValue::kFpEnvironmental, "field reflects local node state", false};
    }
    std::vector<const json*> present;
    for (const auto& [_, value] : divergence.values) {
        if (!value) return std::nullopt;
        present.push_back(&*value);
    }
    const SchemaNode* schema = divergence.schema.get();
    for (std::size_t i = 1; i < present.size(); ++i) {
        if (!canonical_equivalent(*present[0], *present[i], schema)) return std::nullopt;
    }
    return Verdict{VerdictValue::kFpSemanticEquivalent, "canonical: values equal after canonicalization", false};
}

OracleQuery oracle_query_for(const std::string& method, const Divergence& divergence) {
    OracleQuery query;
    query.method = method;
    query.field_path = divergence.field_path;
    query.schema = divergence.schema ? schema_to_json(*divergence.schema) : json::object();
    for (const auto& [id, value] : divergence.values) query.responses[id] = value ? *value : json({{"$absent", true}});
    return query;
}

Verdict classify(const std::string& method, const Divergence& divergence, const ClassifyContext& context,
                 EquivalenceOracle& oracle) {
    if (auto verdict = deterministic_verdict(divergence, context)) return *verdict;
    return ask(oracle, oracle_query_for(method, divergence));
}

FilterResult filter_round(const RoundLog& log, const ApiSpec& spec, EquivalenceOracle& oracle,
                          const FilterOptions& options) {
    FilterResult result;
    const ClassifyContext context{log.readiness ? &*log.readiness : nullptr};
    std::vector<OracleQuery> questions;
    std::map<std::string, std::size_t> question_index;
    std::vector<Pending> pending;

    for (const auto& entry : log.entries) {
        const MethodSpec* method = spec.method(entry.request.method);
        if (method == nullptr) throw Error(ErrorCode::kConfig, "round log names unknown method " + entry.request.method);
        auto divergences = diff_records(entry.records, *method);
        if (divergences.empty()) continue;
        Finding finding;
        finding.request = entry.request;
        finding.records = entry.records;
        for (std::size_t i = 0; i < divergences.size(); ++i) {
            if (!options.enabled) {
                finding.verdicts.push_back({VerdictValue::kGenuineBug, "filter disabled", false});
                continue;
            }
            if (auto verdict = deterministic_verdict(divergences[i], context)) {
                finding.verdicts.push_back(*verdict);
                continue;
            }
            auto query = oracle_query_for(method->name, divergences[i]);
            auto [it, inserted] = question_index.emplace(question_key(query), questions.size());
            if (inserted) questions.push_back(std::move(query));
            pending.push_back({result.findings.size(), i, it->second});
            finding.verdicts.emplace_back();
        }
        finding.divergences = std::move(divergences);
        result.findings.push_back(std::move(finding));
    }

    std::vector<Verdict> answers(questions.size());
    const std::size_t width = std::max<std::uint32_t>(options.oracle_parallelism, 1);
    for (std::size_t start = 0; start < questions.size(); start += width) {
        std::vector<std::future<Verdict>> batch;
        for (std::size_t i = start; i < std::min(questions.size(), start + width); ++i) {
            batch.push_back(std::async(std::launch::async, [&oracle, &questions, i] { return ask(oracle, questions[i]); }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) answers[start + i] = batch[i].get();
    }
    for (const auto& p : pending) result.findings[p.finding].verdicts[p.divergence] = answers[p.question];
    result.oracle_queries = questions.size();

    for (const auto& finding : result.findings) {
        for (const auto& verdict : finding.verdicts) ++result.counts[verdict.value];
    }
    return result;
}

std::vector<ReportEntry> dedup_findings(const std::vector<Finding>& findings) {
    std::vector<ReportEntry> entries;
    std::map<std::tuple<std::string, std::string, DivergenceKind, ConsistencyPolicy>, std::size_t> index;
    for (std::size_t f = 0; f < findings.size(); ++f) {
        const auto& finding = findings[f];
        for (std::size_t d = 0; d < finding.divergences.size(); ++d) {
            if (finding.verdicts[d].value != VerdictValue::kGenuineBug) continue;
            const auto& divergence = finding.divergences[d];
            auto key = std::make_tuple(finding.request.method, divergence.field_path, divergence.kind, divergence.policy);
            auto [it, inserted] = index.emplace(key, entries.size());
            if (inserted) {
                entries.push_back({finding.request.method, divergence.field_path, divergence.kind, divergence.policy, 0, f,
                                   finding.verdicts[d].reason});
            }
            ++entries[it->second].occurrences;
        }
    }
    std::sort(entries.begin(), entries.end(), [](const ReportEntry& a, const ReportEntry& b) {
        return std::tie(a.method, a.field_path, a.kind) < std::tie(b.method, b.field_path, b.kind);
    });
    return entries;
}

double compute_fdr(std::uint64_t tp, std::uint64_t fp) {
    if (tp + fp == 0) throw Error(ErrorCode::kUndefinedRate, "FDR undefined: no reported findings");
    return 100.0 * static_cast<double>(fp) / static_cast<double>(tp + fp);
}

}  // namespace specdiff
