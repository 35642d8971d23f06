// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    using EntryKey = std::tuple<std::string, std::string, DivergenceKind, ConsistencyPolicy>;

    EntryKey key_of(const std::string& method, const Divergence& divergence) {
        return {method, divergence.field_path, divergence.kind, divergence.policy};
    }

    std::optional<std::string> rejection_message(const ResponseRecord& record) {
        if (!record.body || !record.body->is_object()) return std::nullopt;
        const auto& body = *record.body;
        if (body.contains("error") && body["error"].is_object()) {
            if (body["error"].contains("message") && body["error"]["message"].is_string()) {
                return body["error"]["message"].get<std::string>();
            }
            return std::nullopt;
        }
        if (body.contains("message") && body["message"].is_string()) return body["message"].get<std::string>();
        return std::nullopt;
    }

    bool path_matches(const mock::Injection& injection, const std::string& path) {
        using mock::Action;
        switch (injection.action) {
            case Action::kWrongStatus:
            case Action::kStall:
            case Action::kCrashMessage: return true;
            case Action::kErrorMessage: return path == "/error/message" || path == "/message";
            default: break;
        }
        const auto& target = injection.path;
        return path == target || path.starts_with(target + "/") || target.starts_with(path + "/");
    }

    // The injected node's value must differ from some other node's.
    bool injected_node_diverges(const mock::Injection& injection, const Divergence& divergence,
                                const std::map<int, int>& node_of) {
        for (const auto& [id, value] : divergence.values) {
            auto node = node_of.find(id);
            if (node == node_of.end()) continue;
            if (!injection.targets(node->second, "node-" + std::to_string(node->second))) continue;
            for (const auto& [other_id, other] : divergence.values) {
                auto other_node = node_of.find(other_id);
                if (other_node == node_of.end()) continue;
                if (injection.targets(other_node->second, "node-" + std::to_string(other_node->second))) continue;
                if (other != value) return true;
            }
        }
        return false;
    }

    std::string describe(const mock::Injection& injection) {
        std::string text = injection.method + " " + std::string(to_string(injection.action));
        if (!injection.path.empty()) text += " " + injection.path;
        return text;
    }

    json record_for_report(const ResponseRecord& record) {
        json out = record_to_json(record);
        out.erase("latency_ms");
        return out;
    }

    json metrics_to_json(const LabeledMetrics& metrics) {
        return {{"tp", metrics.tp},
                {"fp", metrics.fp},
                {"unattributed", metrics.unattributed},
                {"reported", metrics.reported},
                {"fdr_percent", metrics.fdr ? json(*metrics.fdr) : json(nullptr)},
                {"missed", metrics.missed}};
    }

    std::string percent(const std::optional<double>& value) {
        if (!value) return "undefined";
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%.2f%%", *value);
        return buffer;
    }

    const Divergence* entry_divergence(const RunReport& report, const ReportEntry& entry) {
        const auto& finding = report.findings.at(entry.first_finding);
        const auto key = std::make_tuple(entry.method, entry.field_path, entry.kind, entry.policy);
        for (const auto& divergence : finding.divergences) {
            if (key_of(finding.request.method, divergence) == key) return &divergence;
        }
        return nullptr;
    }

    std::string label_of(const RunReport& report, int endpoint_id) {
        auto it = report.endpoint_labels.find(endpoint_id);
        return it == report.endpoint_labels.end() ? "endpoint " + std::to_string(endpoint_id) : it->second;
    }

}  // namespace

bool is_validation_rejection(const ResponseRecord& record) {
    if (record.transport_error) return false;
    if (record.http_status == 400 || record.http_status == 422) return true;
    if (!record.body || !record.body->is_object()) return false;
    const auto& body = *record.body;
    if (!body.contains("error") || !body["error"].is_object()) return false;
    const auto code = body["error"].value("code", json());
    return code == -32600 || code == -32602;
}

std::vector<SpecDefect> suspected_spec_defects(const RoundLog& log) {
    struct Tally {
        std::size_t requests = 0;
        bool uniform = true;
        std::set<std::string> messages;
    };
    std::map<std::string, Tally> tallies;
    for (const auto& entry : log.entries) {
        if (entry.request.validity == Validity::kSyntacticInvalid) continue;
        auto& tally = tallies[entry.request.method];
        ++tally.requests;
        if (entry.records.empty()) tally.uniform = false;
        for (const auto& record : entry.records) {
            if (!is_validation_rejection(record)) {
                tally.uniform = false;
                continue;
            }
            if (auto message = rejection_message(record)) tally.messages.insert(*message);
        }
    }
    std::vector<SpecDefect> defects;
    for (auto& [method, tally] : tallies) {
        if (tally.requests == 0 || !tally.uniform) continue;
        defects.push_back({method, tally.requests, {tally.messages.begin(), tally.messages.end()}});
    }
    return defects;
}

LabeledMetrics score_findings(const std::vector<Finding>& findings, const std::vector<mock::Injection>& injections,
                              const std::map<int, int>& node_of) {
    std::map<EntryKey, std::set<std::size_t>> entries;
    for (const auto& finding : findings) {
        for (std::size_t d = 0; d < finding.divergences.size(); ++d) {
            if (finding.verdicts[d].value != VerdictValue::kGenuineBug) continue;
            const auto& divergence = finding.divergences[d];
            auto& attributed = entries[key_of(finding.request.method, divergence)];
            for (std::size_t i = 0; i < injections.size(); ++i) {
                const auto& injection = injections[i];
                if (injection.method != finding.request.method) continue;
                if (!path_matches(injection, divergence.field_path)) continue;
                if (injected_node_diverges(injection, divergence, node_of)) attributed.insert(i);
            }
        }
    }
    LabeledMetrics metrics;
    metrics.reported = entries.size();
    std::set<std::size_t> detected;
    for (const auto& [_, attributed] : entries) {
        if (attributed.empty()) ++metrics.unattributed;
        detected.insert(attributed.begin(), attributed.end());
    }
    for (std::size_t i = 0; i < injections.size(); ++i) {
        const bool benign = injections[i].label == "benign";
        if (detected.count(i) != 0) {
            ++(benign ? metrics.fp : metrics.tp);
        } else if (!benign) {
            metrics.missed.push_back(describe(injections[i]));
        }
    }
    metrics.fp += metrics.unattributed;
    if (metrics.tp + metrics.fp > 0) metrics.fdr = compute_fdr(metrics.tp, metrics.fp);
    return metrics;
}

json report_to_json(const RunReport& report) {
    json out;
    out["metadata"] = report.metadata;
    out["readiness"] = report.readiness ? readiness_to_json(*report.readiness) : json(nullptr);
    out["request_counts"] = report.request_counts;

    json findings = json::array();
    for (const auto& entry : report.entries) {
        const auto& finding = report.findings.at(entry.first_finding);
        json item = {{"method", entry.method},
                     {"field_path", entry.field_path},
                     {"kind", to_string(entry.kind)},
                     {"policy", to_string(entry.policy)},
                     {"occurrences", entry.occurrences},
                     {"reason", entry.reason},
                     {"request", request_to_json(finding.request)}};
        const auto* divergence = entry_divergence(report, entry);
        item["divergence"] = divergence != nullptr ? divergence_to_json(*divergence) : json(nullptr);
        item["records"] = json::array();
        for (const auto& record : finding.records) item["records"].push_back(record_for_report(record));
        findings.push_back(std::move(item));
    }
    out["findings"] = std::move(findings);

    json filtered = json::object();
    for (auto value : {VerdictValue::kGenuineBug, VerdictValue::kFpEnvironmental, VerdictValue::kFpAllowed,
                       VerdictValue::kFpSemanticEquivalent}) {
        auto it = report.verdict_counts.find(value);
        filtered[std::string(to_string(value))] = it == report.verdict_counts.end() ? 0 : it->second;
    }
    out["filtered"] = filtered;
    out["oracle_queries"] = report.oracle_queries;

    json defects = json::array();
    for (const auto& defect : report.spec_defects) {
        defects.push_back({{"method", defect.method}, {"requests", defect.requests}, {"messages", defect.messages}});
    }
    out["suspected_spec_defects"] = std::move(defects);
    if (report.metrics) {
        out["metrics"] = {{"with_filter", metrics_to_json(report.metrics->with_filter)},
                          {"without_filter", metrics_to_json(report.metrics->without_filter)}};
    } else {
        out["metrics"] = nullptr;
    }
    out["warnings"] = report.warnings;
    if (report.replay) out["replay"] = *report.replay;
    return out;
}

std::string report_to_markdown(const RunReport& report) {
    std::ostringstream md;
    md << "# specdiff run report\n\n";
    md << "- Seed: " << report.metadata.value("seed", json()).dump() << "\n";
    md << "- Mix: " << report.metadata.value("mix", std::string()) << "\n";
    md << "- Oracle mode: " << report.metadata.value("oracle_mode", std::string()) << "\n";
    std::size_t total = 0;
    for (const auto& [_, count] : report.request_counts) total += count;
    md << "- Requests: " << total << " across " << report.request_counts.size() << " methods\n";
    md << "- Findings: " << report.entries.size() << "\n\n";

    md << "| verdict | divergences |\n|---|---|\n";
    for (const auto& [value, count] : report.verdict_counts) md << "| " << to_string(value) << " | " << count << " |\n";
    md << "\n";

    if (report.metrics) {
        md << "## Metrics\n\n| | TP | FP | FDR |\n|---|---|---|---|\n";
        const auto row = [&](const char* name, const LabeledMetrics& m) {
            md << "| " << name << " | " << m.tp << " | " << m.fp << " | " << percent(m.fdr) << " |\n";
        };
        row("with filter", report.metrics->with_filter);
        row("without filter", report.metrics->without_filter);
        md << "\n";
    }

    if (!report.spec_defects.empty()) {
        md << "## Suspected specification defects\n\n";
        for (const auto& defect : report.spec_defects) {
            md << "- `" << defect.method << "`: all " << defect.requests
               << " well-formed requests were rejected as invalid by every endpoint";
            if (!defect.messages.empty()) {
                md << " (";
                for (std::size_t i = 0; i < defect.messages.size(); ++i) md << (i ? "; " : "") << '"' << defect.messages[i] << '"';
                md << ")";
            }
            md << "\n";
        }
        md << "\n";
    }

    for (const auto& entry : report.entries) {
        const auto& finding = report.findings.at(entry.first_finding);
        md << "## " << entry.method << ": " << to_string(entry.kind) << " at `" << entry.field_path << "`\n\n";
        md << "- Method: `" << entry.method << "`\n";
        md << "- Policy: " << to_string(entry.policy) << "\n";
        md << "- Occurrences: " << entry.occurrences << "\n";
        md << "- Verdict: genuine_bug (" << entry.reason << ")\n\n";
        md << "### Request\n\n```json\n" << request_to_json(finding.request).dump(2) << "\n```\n\n";
        md << "### Responses\n\n";
        for (const auto& record : finding.records) {
            md << "**" << label_of(report, record.endpoint_id) << "**: ";
            if (record.transport_error) {
                md << to_string(*record.transport_error) << "\n\n";
                continue;
            }
            md << "HTTP " << record.http_status.value_or(0) << "\n\n```json\n"
               << (record.body ? record.body->dump(2) : record.raw_body) << "\n```\n\n";
        }
    }
    if (!report.warnings.empty()) {
        md << "## Warnings\n\n";
        for (const auto& warning : report.warnings) md << "- " << warning << "\n";
    }
    return md.str();
}

void write_report(const RunReport& report, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kConfig, "cannot create report directory " + dir + ": " + ec.message());
    const auto write = [&](const std::string& name, const std::string& text) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path.string());
        out << text;
    };
    write("run_report.json", report_to_json(report).dump(2) + "\n");
    write("run_report.md", report_to_markdown(report));
}

}  // namespace specdiff
