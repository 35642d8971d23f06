// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "brute_diff.hpp"
#include "reference_validator.hpp"
#include "specdiff/error.hpp"
#include "specdiff/pipeline.hpp"
#include "test_paths.hpp"

using namespace specdiff;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double value, int digits = 2) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << value;
    return out.str();
}

const std::string kSemanticTypes = testpaths::source("specs/semantic_types.json");

// Rebuilds named arguments from what goes on the wire, so the check does
// not trust the generator's own bookkeeping.
json wire_args(const refcheck::RawSpec& raw, const TestRequest& request, bool& undeclared, bool& consistent) {
    const auto& params = raw.methods().at(request.method);
    json args = json::object();
    undeclared = false;
    consistent = true;
    if (request.transport == Transport::kJsonRpcPost) {
        const json& positional = request.body.at("params");
        for (std::size_t i = 0; i < positional.size(); ++i) {
            if (i < params.size()) {
                args[params[i].name] = positional[i];
            } else {
                args["$extra" + std::to_string(i)] = positional[i];  // no such param: the checker rejects it
                undeclared = true;
            }
        }
        return args;
    }
    args = request.args;
    const auto& path = request.path.value_or("");
    for (const auto& [key, _] : request.extra_query.items()) {
        if (path.find("?" + key + "=") != std::string::npos || path.find("&" + key + "=") != std::string::npos) {
            args[key] = request.extra_query[key];
            undeclared = true;
        } else {
            consistent = false;
        }
    }
    if (request.transport == Transport::kRestPost) {
        // The wire body must be the logical body plus any undeclared keys.
        json expected = args.value("body", json());
        for (const auto& [key, value] : request.extra_body.items()) {
            expected[key] = value;
            undeclared = true;
        }
        const auto sent = wire_body(request);
        if (sent.empty() ? !expected.is_null() : json::parse(sent) != expected) consistent = false;
        if (!expected.is_null()) args["body"] = expected;
    }
    return args;
}

Outcome criterion_generation_validity() {
    const auto start = Clock::now();
    std::size_t checked = 0;
    std::size_t failures = 0;
    std::size_t rejected = 0;
    std::size_t undeclared_only = 0;
    std::string first_failure;
    for (const char* file : {"specs/eth_getBalance.json", "specs/execution_api.json", "specs/beacon_api.json"}) {
        const auto path = testpaths::source(file);
        const refcheck::RawSpec raw(read_json_file(path));
        const auto spec = parse_spec(read_text_file(path), path);
        const int seeds = std::string(file).find("Balance") != std::string::npos ? 500 : 40;
        for (int seed = 1; seed <= seeds; ++seed) {
            for (const auto& request : gen_batch(spec, {6, 6, 0}, static_cast<std::uint64_t>(seed)).requests) {
                bool undeclared = false;
                bool consistent = true;
                const auto args = wire_args(raw, request, undeclared, consistent);
                const bool valid = raw.args_valid(request.method, args);
                bool ok = consistent;
                if (request.validity == Validity::kSyntacticInvalid) {
                    const bool noted_extra = request.category == InvalidCategory::kUndefinedField && undeclared &&
                                             request.fault_note && request.fault_note->starts_with("undefined field");
                    ok = ok && (!valid || noted_extra);
                    rejected += valid ? 0 : 1;
                    undeclared_only += valid && noted_extra ? 1 : 0;
                } else {
                    ok = ok && valid && !undeclared;
                }
                ++checked;
                if (!ok) {
                    ++failures;
                    if (first_failure.empty()) first_failure = request_to_json(request).dump();
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = checked >= 10000 && failures == 0 && elapsed < 60;
    out.detail = std::to_string(checked) + " requests, " + std::to_string(failures) + " mismatches (" + std::to_string(rejected) +
                 " invalid rejected by the checker, " + std::to_string(undeclared_only) + " invalid only by an undeclared key), " +
                 fixed(elapsed, 1) + " s";
    if (!first_failure.empty()) out.detail += "; first: " + first_failure.substr(0, 300);
    return out;
}

Outcome criterion_category_coverage() {
    const auto spec = load_spec({});
    std::size_t methods = 0;
    std::size_t batches = 0;
    std::string missing;
    for (std::uint32_t invalid = 3; invalid <= 7; ++invalid) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto batch = gen_batch(spec, {invalid, 1, 0}, seed);
            ++batches;
            std::map<std::string, std::set<InvalidCategory>> seen;
            for (const auto& request : batch.requests) {
                if (request.category) seen[request.method].insert(*request.category);
            }
            for (const auto& [name, method] : spec.methods) {
                bool all = true;
                for (auto category : kAllCategories) all = all && category_applicable(method, category);
                if (!all) continue;
                if (invalid == 3 && seed == 1) ++methods;
                if (seen[name].size() != 3 && missing.empty()) missing = name + " (seed " + std::to_string(seed) + ")";
            }
        }
    }
    return {missing.empty() && methods > 0,
            std::to_string(methods) + " eligible methods over " + std::to_string(batches) + " batches" +
                (missing.empty() ? "" : "; incomplete: " + missing)};
}

bool looks_not_found(const json& body) {
    const auto text = body.dump();
    std::string lower(text.size(), ' ');
    std::transform(text.begin(), text.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return lower.find("not found") != std::string::npos;
}

Outcome criterion_semantic_validity() {
    mock::Scenario clean;
    mock::Fleet fleet(clean);
    const auto spec = load_spec({}, kSemanticTypes);
    RunSettings settings;
    settings.mix = {0, 0, 10};
    StubFalseOracle oracle;
    const auto outcome = run_pipeline(spec, fleet.endpoints(), oracle, settings);
    std::size_t semantic = 0;
    std::string bad;
    for (const auto& entry : outcome.log.entries) {
        if (entry.request.validity != Validity::kSemanticValid) continue;
        ++semantic;
        for (const auto& record : entry.records) {
            bool ok = record.http_status == 200 && record.body && !record.body->contains("error");
            if (ok && entry.request.transport == Transport::kJsonRpcPost) {
                ok = record.body->contains("result") && !(*record.body)["result"].is_null();
            }
            ok = ok && !looks_not_found(*record.body);
            if (!ok && bad.empty()) bad = entry.request.method + " -> " + record.raw_body.substr(0, 160);
        }
    }

    FactStore store;
    store.set_current_slot(100);
    Rng rng(99);
    std::size_t outside = 0;
    std::set<std::uint64_t> distinct;
    for (int i = 0; i < 10000; ++i) {
        const auto slot = mutate_semantic("state_id.slot", store, rng).get<std::uint64_t>();
        if (slot < 1 || slot > 100) ++outside;
        distinct.insert(slot);
    }
    return {bad.empty() && semantic >= 100 && outside == 0 && distinct.size() == 100,
            std::to_string(semantic) + " semantic requests" + (bad.empty() ? "" : ", failed: " + bad) + "; " +
                "10000 slot draws, " + std::to_string(outside) + " outside [1,100], " + std::to_string(distinct.size()) +
                " distinct"};
}

json random_json(Rng& rng, int depth) {
    const auto pick = depth <= 0 ? rng.uniform(0, 3) : rng.uniform(0, 5);
    switch (pick) {
        case 0: return nullptr;
        case 1: return rng.chance(1, 2);
        case 2: return static_cast<std::int64_t>(rng.uniform(0, 4)) - 2;
        case 3: {
            static const char* words[] = {"", "a", "0x1", "0xA", "0xa", "~", "/"};
            return std::string(words[rng.index(7)]);
        }
        case 4: {
            json array = json::array();
            for (auto n = rng.uniform(0, 3); n > 0; --n) array.push_back(random_json(rng, depth - 1));
            return array;
        }
        default: {
            json object = json::object();
            static const char* keys[] = {"a", "b", "c", "a/b", "m~n"};
            for (auto n = rng.uniform(0, 3); n > 0; --n) object[keys[rng.index(5)]] = random_json(rng, depth - 1);
            return object;
        }
    }
}

json perturb(json value, Rng& rng) {
    if ((value.is_object() || value.is_array()) && !value.empty() && rng.chance(4, 5)) {
        if (value.is_object()) {
            auto it = value.begin();
            std::advance(it, static_cast<long>(rng.index(value.size())));
            if (rng.chance(1, 4)) {
                value.erase(it);
            } else {
                *it = perturb(*it, rng);
            }
        } else {
            const auto i = rng.index(value.size());
            if (rng.chance(1, 5)) {
                value.erase(i);
            } else {
                value[i] = perturb(value[i], rng);
            }
        }
        return value;
    }
    return rng.chance(1, 3) ? value : random_json(rng, 2);
}

ResponseRecord record(int id, const json& body) {
    ResponseRecord r;
    r.endpoint_id = id;
    r.http_status = 200;
    r.body = body;
    r.raw_body = body.dump();
    return r;
}

Outcome criterion_diff_oracle() {
    Rng rng(4242);
    std::size_t disagreements = 0;
    std::size_t divergent_pairs = 0;
    std::string example;
    for (int i = 0; i < 1000; ++i) {
        const json a = random_json(rng, 5);
        const json b = rng.chance(1, 4) ? random_json(rng, 5) : perturb(a, rng);
        refcheck::DiffSet got;
        for (const auto& d : diff_records({record(0, a), record(1, b)}, nullptr)) {
            got.insert({d.field_path, std::string(to_string(d.kind))});
        }
        const auto expected = refcheck::brute_diff(a, b);
        divergent_pairs += expected.empty() ? 0 : 1;
        if (got != expected) {
            ++disagreements;
            if (example.empty()) example = a.dump() + " vs " + b.dump();
        }
    }
    return {disagreements == 0 && divergent_pairs > 500,
            "1000 pairs, " + std::to_string(divergent_pairs) + " divergent, " + std::to_string(disagreements) +
                " disagreements" + (example.empty() ? "" : "; first: " + example.substr(0, 300))};
}

struct LabeledRun {
    ApiSpec spec;
    RunOutcome outcome;
    std::vector<Endpoint> endpoints;
    double seconds = 0;
};

LabeledRun labeled_run() {
    const auto start = Clock::now();
    LabeledRun run;
    const auto scenario = mock::scenario_from_json(read_json_file(testpaths::source("scenarios/labeled_30.json")));
    mock::Fleet fleet(scenario);
    run.spec = load_spec({}, kSemanticTypes);
    run.endpoints = fleet.endpoints(1000);
    RunSettings settings;
    settings.oracle_mode = "stub_lookup";
    settings.labels = scenario.injections;
    auto oracle = make_oracle("stub_lookup:" + testpaths::source("scenarios/equivalence_pairs.json"));
    run.outcome = run_pipeline(run.spec, run.endpoints, *oracle, settings);
    run.seconds = seconds_since(start);
    return run;
}

// Independent FDR: integer arithmetic, rounded to hundredths.
std::string reference_fdr(std::size_t tp, std::size_t fp) {
    const std::size_t total = tp + fp;
    const std::size_t hundredths = (fp * 10000 * 2 + total) / (2 * total);
    return std::to_string(hundredths / 100) + "." + (hundredths % 100 < 10 ? "0" : "") + std::to_string(hundredths % 100);
}

Outcome criterion_labeled_fdr(const LabeledRun& run) {
    const auto& report = run.outcome.report;
    if (!report.metrics) return {false, "no metrics computed"};
    const auto& on = report.metrics->with_filter;
    const auto& off = report.metrics->without_filter;
    std::ostringstream detail;
    detail << report.entries.size() << " genuine entries, tp " << on.tp << ", fp " << on.fp << ", fdr "
           << (on.fdr ? fixed(*on.fdr) : "undefined") << "% with filter, "
           << (off.fdr ? fixed(*off.fdr) : "undefined") << "% without (tp " << off.tp << ", fp " << off.fp << "), "
           << fixed(run.seconds, 1) << " s";
    for (const auto& missed : on.missed) detail << "; missed " << missed;
    const bool pass = report.entries.size() == 10 && on.tp == 10 && on.fp == 0 && on.fdr &&
                      fixed(*on.fdr) == reference_fdr(on.tp, on.fp) && fixed(*on.fdr) == "0.00" && off.fdr &&
                      fixed(*off.fdr) == reference_fdr(off.tp, off.fp) && fixed(*off.fdr) == "66.67" &&
                      run.seconds < 120;
    return {pass, detail.str()};
}

Outcome criterion_fdr_anchors() {
    struct Anchor {
        std::size_t tp, fp;
        std::string expected;
    };
    const Anchor anchors[] = {{18, 7, "28.00"}, {18, 34, "65.38"}, {5, 0, "0.00"}, {10, 20, "66.67"}};
    std::string detail;
    bool pass = true;
    for (const auto& a : anchors) {
        const auto got = fixed(compute_fdr(a.tp, a.fp));
        pass = pass && got == a.expected && reference_fdr(a.tp, a.fp) == a.expected;
        detail += "(" + std::to_string(a.tp) + "," + std::to_string(a.fp) + ")=" + got + " ";
    }
    bool undefined = false;
    try {
        compute_fdr(0, 0);
    } catch (const Error& e) {
        undefined = e.code() == ErrorCode::kUndefinedRate;
    }
    return {pass && undefined, detail + "(0,0)=" + (undefined ? "undefined" : "defined")};
}

Outcome criterion_spec_defect() {
    mock::Scenario clean;
    mock::Fleet fleet(clean);
    const auto spec = load_spec({testpaths::source("specs/beacon_publish_block.json")});
    RunSettings settings;
    StubFalseOracle oracle;
    const auto outcome = run_pipeline(spec, fleet.endpoints(), oracle, settings);
    std::size_t wellformed = 0;
    std::size_t rejected = 0;
    for (const auto& entry : outcome.log.entries) {
        if (entry.request.method != "publishBlockV2" || entry.request.validity == Validity::kSyntacticInvalid) continue;
        ++wellformed;
        bool all = true;
        for (const auto& r : entry.records) {
            all = all && is_validation_rejection(r) && r.raw_body.find("expected 33 and 32 found") != std::string::npos;
        }
        rejected += all ? 1 : 0;
    }
    bool flagged = false;
    for (const auto& defect : outcome.report.spec_defects) {
        for (const auto& message : defect.messages) {
            flagged = flagged || (defect.method == "publishBlockV2" &&
                                  message.find("expected 33 and 32 found") != std::string::npos);
        }
    }
    return {wellformed > 0 && rejected == wellformed && flagged,
            std::to_string(rejected) + "/" + std::to_string(wellformed) + " well-formed requests rejected by every node; " +
                (flagged ? "defect flagged" : "defect not flagged")};
}

Outcome criterion_determinism(const LabeledRun& first) {
    const auto second = labeled_run();
    auto a = report_to_json(first.outcome.report);
    auto b = report_to_json(second.outcome.report);
    a["metadata"].erase("generated_at");
    b["metadata"].erase("generated_at");
    const auto left = a.dump(2);
    const auto right = b.dump(2);
    std::size_t at = 0;
    while (at < std::min(left.size(), right.size()) && left[at] == right[at]) ++at;
    return {left == right, left == right ? std::to_string(left.size()) + " bytes identical"
                                         : "first difference at byte " + std::to_string(at) + ": " +
                                               left.substr(at > 80 ? at - 80 : 0, 160)};
}

Outcome criterion_conservative(const LabeledRun& run) {
    std::size_t must_identical = 0;
    std::size_t unsupported_fp = 0;
    StubFalseOracle stub;
    for (const auto& finding : filter_round(run.outcome.log, run.spec, stub).findings) {
        for (std::size_t i = 0; i < finding.divergences.size(); ++i) {
            if (finding.divergences[i].policy != ConsistencyPolicy::kMustIdentical) continue;
            ++must_identical;
            const auto& verdict = finding.verdicts[i];
            if (verdict.value == VerdictValue::kFpSemanticEquivalent && !verdict.reason.starts_with("canonical")) {
                ++unsupported_fp;
            }
        }
    }
    UnavailableOracle down;
    std::size_t residual = 0;
    std::size_t not_genuine = 0;
    const ClassifyContext context{run.outcome.log.readiness ? &*run.outcome.log.readiness : nullptr};
    for (const auto& finding : filter_round(run.outcome.log, run.spec, down).findings) {
        for (std::size_t i = 0; i < finding.divergences.size(); ++i) {
            if (deterministic_verdict(finding.divergences[i], context)) continue;
            ++residual;
            const auto& verdict = finding.verdicts[i];
            if (verdict.value != VerdictValue::kGenuineBug || verdict.reason != kOracleUnavailableReason) ++not_genuine;
        }
    }
    return {must_identical > 0 && unsupported_fp == 0 && residual > 0 && not_genuine == 0,
            std::to_string(must_identical) + " must-identical divergences, " + std::to_string(unsupported_fp) +
                " dismissed without a canonical match; " + std::to_string(residual) + " residual with oracle down, " +
                std::to_string(not_genuine) + " not genuine"};
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int number, const std::string& name, const std::function<Outcome()>& check) {
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failed += outcome.pass ? 0 : 1;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << number << ": " << name << " -- "
                  << outcome.detail << std::endl;
    };

    report(1, "generated requests agree with an independent schema check", criterion_generation_validity);
    report(2, "every applicable invalid category appears in each batch", criterion_category_coverage);
    report(3, "semantic requests succeed on the clean fleet; slot draws stay in range", criterion_semantic_validity);
    report(4, "structural diff matches a brute-force comparator", criterion_diff_oracle);

    std::optional<LabeledRun> labeled;
    std::string labeled_error;
    try {
        labeled = labeled_run();
    } catch (const std::exception& e) {
        labeled_error = e.what();
    }
    auto with_labeled = [&](const std::function<Outcome(const LabeledRun&)>& check) {
        return [&, check]() -> Outcome {
            if (!labeled) return {false, "labeled run failed: " + labeled_error};
            return check(*labeled);
        };
    };
    report(5, "labeled scenario: all genuine bugs kept, benign divergences filtered", with_labeled(criterion_labeled_fdr));
    report(6, "false discovery rate anchors", criterion_fdr_anchors);
    report(7, "faulty fixed-length array in the spec is flagged", criterion_spec_defect);
    report(8, "identical inputs give byte-identical reports", with_labeled(criterion_determinism));
    report(9, "filter never dismisses a must-identical divergence without evidence", with_labeled(criterion_conservative));

    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
