// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "specdiff/embedded_data.hpp"
#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    std::string utc_now() {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buffer[32];
        std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buffer;
    }

    std::string mix_text(const TestMix& mix) {
        return std::to_string(mix.invalid) + "," + std::to_string(mix.valid) + "," + std::to_string(mix.semantic);
    }

    json fleet_labels(const std::vector<Endpoint>& fleet) {
        json out = json::array();
        for (const auto& endpoint : fleet) {
            out.push_back({{"endpoint_id", endpoint.endpoint_id}, {"label", endpoint.label}, {"layer", to_string(endpoint.layer)}});
        }
        return out;
    }

    bool uses_layer(const ApiSpec& spec, Layer layer) {
        for (const auto& [_, method] : spec.methods) {
            if (method.layer() == layer) return true;
        }
        return false;
    }

    json record_change(std::uint64_t request_id, int endpoint_id, const std::string& what, json before, json after) {
        return {{"request_id", request_id}, {"endpoint_id", endpoint_id}, {"what", what}, {"logged", std::move(before)},
                {"replayed", std::move(after)}};
    }

    json status_view(const ResponseRecord& record) {
        if (record.transport_error) return std::string(to_string(*record.transport_error));
        return record.http_status ? json(*record.http_status) : json(nullptr);
    }

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json read_json_file(const std::string& path) {
    auto parsed = json::parse(read_text_file(path), nullptr, false);
    if (parsed.is_discarded()) throw Error(ErrorCode::kConfig, path + " is not valid JSON");
    return parsed;
}

ApiSpec load_spec(const std::vector<std::string>& files, const std::optional<std::string>& semantic_types,
                  PolicyClassifier* classifier) {
    std::vector<ApiSpec> parts;
    if (files.empty()) {
        parts.push_back(parse_spec(embedded::kExecutionSpec, "bundled:execution_api.json"));
        parts.push_back(parse_spec(embedded::kBeaconSpec, "bundled:beacon_api.json"));
    }
    for (const auto& file : files) parts.push_back(parse_spec(read_text_file(file), file));
    ApiSpec spec = parts.size() == 1 ? parts.front() : merge_specs(parts);
    if (semantic_types) spec = apply_semantic_types(std::move(spec), read_json_file(*semantic_types));
    RuleTableClassifier rules;
    return annotate_policies(spec, classifier != nullptr ? *classifier : rules).spec;
}

FactExtraction harvest_facts(const ApiSpec& spec, const std::vector<Endpoint>& fleet,
                             const std::vector<FactRule>& rules) {
    FactExtraction merged;
    for (Layer layer : {Layer::kExecution, Layer::kConsensus}) {
        if (!uses_layer(spec, layer)) continue;
        auto endpoints = endpoints_of_layer(fleet, layer);
        if (endpoints.empty()) continue;
        const auto reference = std::min_element(endpoints.begin(), endpoints.end(), [](const auto& a, const auto& b) {
            return a.endpoint_id < b.endpoint_id;
        });
        try {
            auto part = extract_facts(rules, *reference);
            for (const auto& [type, values] : part.store.all()) {
                for (const auto& value : values) merged.store.add(type, value);
            }
            if (auto slot = part.store.current_slot()) merged.store.set_current_slot(*slot);
            if (auto block = part.store.current_block()) merged.store.set_current_block(*block);
            for (auto& failure : part.failures) merged.failures.push_back(std::move(failure));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kEmptyFactStore) throw;
            merged.failures.push_back(std::string(to_string(layer)) + ": " + e.what());
        }
    }
    return merged;
}

ApiSpec servable_subset(const ApiSpec& spec, const std::vector<Endpoint>& fleet, std::vector<std::string>* dropped) {
    ApiSpec subset;
    subset.source_label = spec.source_label;
    subset.title = spec.title;
    for (const auto& [name, method] : spec.methods) {
        if (endpoints_of_layer(fleet, method.layer()).empty()) {
            if (dropped != nullptr) dropped->push_back(name);
            continue;
        }
        subset.methods.emplace(name, method);
    }
    return subset;
}

std::map<int, int> mock_nodes(const std::vector<Endpoint>& fleet) {
    std::map<int, int> nodes;
    for (const auto& endpoint : fleet) {
        if (!endpoint.label.starts_with("node-")) continue;
        try {
            nodes[endpoint.endpoint_id] = std::stoi(endpoint.label.substr(5));
        } catch (const std::exception&) {
        }
    }
    return nodes;
}

RunReport analyze_round(const ApiSpec& spec, const RoundLog& log, const std::vector<Endpoint>& fleet,
                        EquivalenceOracle& oracle, const RunSettings& settings) {
    RunReport report;
    report.metadata = {{"seed", settings.seed},
                       {"mix", mix_text(settings.mix)},
                       {"oracle_mode", settings.oracle_mode},
                       {"filter", settings.filter.enabled},
                       {"fleet", fleet_labels(fleet)},
                       {"spec", spec.source_label},
                       {"threshold_epochs", settings.round.threshold_epochs},
                       {"generated_at", utc_now()}};
    report.readiness = log.readiness;
    for (const auto& endpoint : fleet) report.endpoint_labels[endpoint.endpoint_id] = endpoint.label;
    for (const auto& entry : log.entries) ++report.request_counts[entry.request.method];

    auto filtered = filter_round(log, spec, oracle, settings.filter);
    report.entries = dedup_findings(filtered.findings);
    report.verdict_counts = filtered.counts;
    report.oracle_queries = filtered.oracle_queries;
    report.findings = std::move(filtered.findings);
    report.spec_defects = suspected_spec_defects(log);

    if (!settings.labels.empty()) {
        const auto nodes = mock_nodes(fleet);
        FilterOptions off = settings.filter;
        off.enabled = false;
        const auto unfiltered = filter_round(log, spec, oracle, off);
        Metrics metrics;
        metrics.with_filter = settings.filter.enabled ? score_findings(report.findings, settings.labels, nodes)
                                                      : score_findings(unfiltered.findings, settings.labels, nodes);
        metrics.without_filter = score_findings(unfiltered.findings, settings.labels, nodes);
        report.metrics = std::move(metrics);
    }
    return report;
}

RunOutcome run_pipeline(const ApiSpec& full_spec, const std::vector<Endpoint>& fleet, EquivalenceOracle& oracle,
                        const RunSettings& settings) {
    std::vector<std::string> dropped;
    const ApiSpec spec = servable_subset(full_spec, fleet, &dropped);
    std::vector<std::string> warnings;
    for (const auto& name : dropped) warnings.push_back("no endpoint serves " + name + "; skipped");

    // Readiness first, so facts are not harvested from a fleet that is not ready.
    std::optional<ReadinessReport> readiness;
    if (!settings.round.skip_readiness && !fleet.empty()) {
        readiness = check_readiness(fleet, settings.round.threshold_epochs);
        if (!readiness->ready) throw ReadinessFailure(*readiness);
    }
    auto facts = harvest_facts(spec, fleet, settings.fact_rules);
    for (const auto& failure : facts.failures) warnings.push_back("fact rule failed: " + failure);

    auto batch = gen_batch(spec, settings.mix, settings.seed, &facts.store);
    for (auto& warning : batch.warnings) warnings.push_back(std::move(warning));

    RoundOptions round = settings.round;
    round.skip_readiness = true;
    RunOutcome outcome;
    outcome.log = run_round(spec, fleet, batch.requests, round);
    outcome.log.readiness = readiness;
    outcome.report = analyze_round(spec, outcome.log, fleet, oracle, settings);
    outcome.report.metadata["spec"] = full_spec.source_label;
    for (auto& warning : warnings) outcome.report.warnings.push_back(std::move(warning));
    return outcome;
}

RunOutcome replay_round(const ApiSpec& spec, const RoundLog& logged, const std::vector<Endpoint>& fleet,
                        EquivalenceOracle& oracle, const RunSettings& settings) {
    std::set<int> logged_ids;
    std::set<Layer> layers;
    for (const auto& entry : logged.entries) {
        layers.insert(layer_of(entry.request.transport));
        for (const auto& record : entry.records) logged_ids.insert(record.endpoint_id);
    }
    // Only endpoints of the layers the log exercised take part.
    std::set<int> fleet_ids;
    for (const auto& endpoint : fleet) {
        if (layers.count(endpoint.layer)) fleet_ids.insert(endpoint.endpoint_id);
    }
    if (!logged_ids.empty() && logged_ids != fleet_ids) {
        throw Error(ErrorCode::kConfig, "fleet mismatch: round log has " + std::to_string(logged_ids.size()) +
                                            " endpoints, fleet has " + std::to_string(fleet_ids.size()));
    }

    std::vector<TestRequest> requests;
    for (const auto& entry : logged.entries) requests.push_back(entry.request);
    RunOutcome outcome;
    outcome.log = requests.empty() ? RoundLog{} : run_round(spec, fleet, requests, settings.round);

    json changes = json::array();
    for (std::size_t i = 0; i < outcome.log.entries.size(); ++i) {
        const auto& before = logged.entries[i].records;
        const auto& after = outcome.log.entries[i].records;
        std::map<int, const ResponseRecord*> previous;
        for (const auto& record : before) previous[record.endpoint_id] = &record;
        for (const auto& record : after) {
            auto it = previous.find(record.endpoint_id);
            if (it == previous.end()) continue;
            const auto& old = *it->second;
            const auto id = record.request_id;
            if (status_view(old) != status_view(record)) {
                changes.push_back(record_change(id, record.endpoint_id, "status", status_view(old), status_view(record)));
            } else if (old.body != record.body) {
                changes.push_back(record_change(id, record.endpoint_id, "body", old.body ? *old.body : json(nullptr),
                                                record.body ? *record.body : json(nullptr)));
            }
        }
    }
    outcome.report = analyze_round(spec, outcome.log, fleet, oracle, settings);
    outcome.report.replay = json{{"requests", requests.size()}, {"changed_records", std::move(changes)}};
    return outcome;
}

}  // namespace specdiff
