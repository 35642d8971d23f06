// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

// specdiff command-line front end. Exit codes: 0 clean, 2 genuine findings,
// 1 configuration or runtime error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "specdiff/error.hpp"
#include "specdiff/oracle.hpp"
#include "specdiff/pipeline.hpp"

namespace {

using specdiff::Error;
using specdiff::ErrorCode;
using specdiff::json;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

// Flag > environment > config file > default.
class Settings {
  public:
    void load(const std::optional<std::string>& path) {
        if (path) config_ = specdiff::read_json_file(*path);
        if (!config_.is_object()) throw Error(ErrorCode::kConfig, "config file must hold a JSON object");
    }

    std::string text(const std::optional<std::string>& flag, const char* env, const char* key,
                     const std::string& fallback) const {
        if (flag) return *flag;
        if (const char* value = std::getenv(env); value != nullptr && *value != '\0') return value;
        if (config_.contains(key)) return config_[key].is_string() ? config_[key].get<std::string>() : config_[key].dump();
        return fallback;
    }

    std::uint64_t number(const std::optional<std::uint64_t>& flag, const char* env, const char* key,
                         std::uint64_t fallback) const {
        if (flag) return *flag;
        const auto raw = text(std::nullopt, env, key, "");
        if (raw.empty()) return fallback;
        try {
            std::size_t used = 0;
            const auto value = std::stoull(raw, &used);
            if (used == raw.size()) return value;
        } catch (const std::exception&) {
        }
        throw Error(ErrorCode::kConfig, std::string("setting ") + key + " is not a non-negative integer: " + raw);
    }

    bool flag(bool set, const char* env, const char* key) const {
        if (set) return true;
        const auto raw = text(std::nullopt, env, key, "false");
        return raw == "1" || raw == "true";
    }

  private:
    json config_ = json::object();
};

struct Common {
    std::optional<std::string> config;
    std::vector<std::string> specs;
    std::optional<std::string> semantic_types;
    std::optional<std::string> fact_rules;
    std::optional<std::string> fleet;
    std::optional<std::string> scenario;
    std::optional<std::string> mix;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> oracle_mode;
    std::optional<std::string> oracle_url;
    std::optional<std::string> oracle_model;
    std::optional<std::string> report_dir;
    std::optional<std::uint64_t> threshold_epochs;
    std::optional<std::uint64_t> timeout_ms;
    bool skip_readiness = false;
    bool no_filter = false;
    std::optional<std::string> out;
    std::optional<std::string> facts;
    std::optional<std::string> roundlog;
    std::optional<std::string> classifier;
    std::optional<std::uint64_t> nodes;
    std::optional<std::uint64_t> duration_ms;
};

// A fleet given by file, or a mock fleet spawned in-process from a scenario.
struct FleetHandle {
    std::unique_ptr<specdiff::mock::Fleet> mock;
    std::vector<specdiff::Endpoint> endpoints;
    std::vector<specdiff::mock::Injection> labels;
};

FleetHandle open_fleet(const Common& options, std::uint32_t timeout_ms) {
    if (options.fleet.has_value() == options.scenario.has_value()) {
        throw Error(ErrorCode::kConfig, "give exactly one of --fleet and --scenario");
    }
    FleetHandle handle;
    if (options.fleet) {
        handle.endpoints = specdiff::fleet_from_json(specdiff::read_json_file(*options.fleet));
        return handle;
    }
    const auto scenario = specdiff::mock::scenario_from_json(specdiff::read_json_file(*options.scenario));
    handle.mock = std::make_unique<specdiff::mock::Fleet>(scenario);
    handle.endpoints = handle.mock->endpoints(timeout_ms);
    const bool labeled = std::any_of(scenario.injections.begin(), scenario.injections.end(),
                                     [](const auto& injection) { return !injection.label.empty(); });
    if (labeled) handle.labels = scenario.injections;
    return handle;
}

specdiff::ChatConfig chat_config(const Common& options, const Settings& settings) {
    specdiff::ChatConfig chat;
    chat.base_url = settings.text(options.oracle_url, "SPECDIFF_ORACLE_URL", "oracle_url", chat.base_url);
    chat.model = settings.text(options.oracle_model, "SPECDIFF_ORACLE_MODEL", "oracle_model", chat.model);
    return chat;
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kConfig, "cannot write " + *path);
    out << text;
}

specdiff::RunSettings run_settings(const Common& options, const Settings& settings) {
    specdiff::RunSettings run;
    run.mix = specdiff::parse_mix(settings.text(options.mix, "SPECDIFF_MIX", "mix", "5,5,10"));
    run.seed = settings.number(options.seed, "SPECDIFF_SEED", "seed", 1);
    run.oracle_mode = settings.text(options.oracle_mode, "SPECDIFF_ORACLE_MODE", "oracle_mode", "stub_false");
    run.round.threshold_epochs = settings.number(options.threshold_epochs, "SPECDIFF_THRESHOLD_EPOCHS",
                                                 "threshold_epochs", specdiff::kDefaultThresholdEpochs);
    run.round.skip_readiness = settings.flag(options.skip_readiness, "SPECDIFF_SKIP_READINESS", "skip_readiness");
    run.filter.enabled = !settings.flag(options.no_filter, "SPECDIFF_NO_FILTER", "no_filter");
    const auto rules = settings.text(options.fact_rules, "SPECDIFF_FACT_RULES", "fact_rules", "");
    if (!rules.empty()) run.fact_rules = specdiff::rules_from_json(specdiff::read_json_file(rules));
    return run;
}

std::uint32_t timeout_of(const Common& options, const Settings& settings) {
    const auto value = settings.number(options.timeout_ms, "SPECDIFF_TIMEOUT_MS", "timeout_ms", specdiff::kDefaultTimeoutMs);
    if (value == 0 || value > 600'000) throw Error(ErrorCode::kConfig, "timeout must be in 1..600000 ms");
    return static_cast<std::uint32_t>(value);
}

int finish_report(const specdiff::RunOutcome& outcome, const std::string& dir) {
    specdiff::write_report(outcome.report, dir);
    const auto& report = outcome.report;
    std::cout << "requests: " << outcome.log.entries.size() << "\n"
              << "findings: " << report.entries.size() << "\n"
              << "suspected spec defects: " << report.spec_defects.size() << "\n";
    if (report.metrics) {
        const auto fdr = [](const std::optional<double>& v) {
            if (!v) return std::string("undefined");
            char text[32];
            std::snprintf(text, sizeof text, "%.2f%%", *v);
            return std::string(text);
        };
        std::cout << "fdr with filter: " << fdr(report.metrics->with_filter.fdr) << "\n"
                  << "fdr without filter: " << fdr(report.metrics->without_filter.fdr) << "\n";
    }
    std::cout << "report: " << (std::filesystem::path(dir) / "run_report.json").string() << "\n";
    return report.has_genuine() ? 2 : 0;
}

int cmd_annotate(const Common& options, const Settings& settings) {
    if (options.specs.size() != 1) throw Error(ErrorCode::kConfig, "annotate takes exactly one --spec");
    const auto& input = options.specs.front();
    const auto mode = settings.text(options.classifier, "SPECDIFF_CLASSIFIER", "classifier", "rules");
    std::unique_ptr<specdiff::PolicyClassifier> classifier;
    if (mode == "rules") {
        classifier = std::make_unique<specdiff::RuleTableClassifier>();
    } else if (mode == "external") {
        classifier = std::make_unique<specdiff::ChatPolicyClassifier>(chat_config(options, settings));
    } else if (mode.starts_with("rules:")) {
        classifier = std::make_unique<specdiff::RuleTableClassifier>(
            specdiff::RuleTableClassifier::from_json(specdiff::read_json_file(mode.substr(6))));
    } else {
        throw Error(ErrorCode::kConfig, "unknown classifier " + mode);
    }
    const auto spec = specdiff::parse_spec(specdiff::read_text_file(input), input);
    // Fully classified before anything is written.
    const auto annotated = specdiff::annotate_policies(spec, *classifier);
    std::filesystem::path out = options.out ? std::filesystem::path(*options.out) : std::filesystem::path(input);
    if (!options.out) out.replace_extension(".annotated.json");
    write_text(out.string(), specdiff::spec_to_json(annotated.spec).dump(2) + "\n");
    std::cout << out.string() << "\n";
    return 0;
}

int cmd_facts(const Common& options, const Settings& settings) {
    auto run = run_settings(options, settings);
    auto fleet = open_fleet(options, timeout_of(options, settings));
    const auto spec = specdiff::load_spec(options.specs, options.semantic_types);
    const auto extraction = specdiff::harvest_facts(spec, fleet.endpoints, run.fact_rules);
    for (const auto& failure : extraction.failures) std::cerr << "fact rule failed: " << failure << "\n";
    if (extraction.store.empty()) throw Error(ErrorCode::kEmptyFactStore, "no facts extracted");
    write_text(options.out, extraction.store.to_json().dump(2) + "\n");
    return 0;
}

int cmd_generate(const Common& options, const Settings& settings) {
    const auto run = run_settings(options, settings);
    const auto spec = specdiff::load_spec(options.specs, options.semantic_types);
    std::optional<specdiff::FactStore> facts;
    if (options.facts) facts = specdiff::FactStore::from_json(specdiff::read_json_file(*options.facts));
    const auto batch = specdiff::gen_batch(spec, run.mix, run.seed, facts ? &*facts : nullptr);
    for (const auto& warning : batch.warnings) std::cerr << "warning: " << warning << "\n";
    write_text(options.out, specdiff::batch_to_jsonl(batch.requests));
    return 0;
}

int cmd_run(const Common& options, const Settings& settings) {
    auto run = run_settings(options, settings);
    const auto report_dir = settings.text(options.report_dir, "SPECDIFF_REPORT_DIR", "report_dir", "specdiff-report");
    const auto spec = specdiff::load_spec(options.specs, options.semantic_types);
    auto oracle = specdiff::make_oracle(run.oracle_mode, chat_config(options, settings));
    auto fleet = open_fleet(options, timeout_of(options, settings));
    run.labels = fleet.labels;
    const auto outcome = specdiff::run_pipeline(spec, fleet.endpoints, *oracle, run);
    std::filesystem::create_directories(report_dir);
    write_text((std::filesystem::path(report_dir) / "roundlog.jsonl").string(), specdiff::roundlog_to_jsonl(outcome.log));
    return finish_report(outcome, report_dir);
}

int cmd_replay(const Common& options, const Settings& settings) {
    if (!options.roundlog) throw Error(ErrorCode::kConfig, "replay needs --roundlog");
    auto run = run_settings(options, settings);
    const auto report_dir = settings.text(options.report_dir, "SPECDIFF_REPORT_DIR", "report_dir", "specdiff-replay");
    const auto spec = specdiff::load_spec(options.specs, options.semantic_types);
    const auto logged = specdiff::roundlog_from_jsonl(specdiff::read_text_file(*options.roundlog));
    auto oracle = specdiff::make_oracle(run.oracle_mode, chat_config(options, settings));
    auto fleet = open_fleet(options, timeout_of(options, settings));
    run.labels = fleet.labels;
    const auto outcome = specdiff::replay_round(spec, logged, fleet.endpoints, *oracle, run);
    return finish_report(outcome, report_dir);
}

int cmd_mockfleet(const Common& options, const Settings& settings) {
    specdiff::mock::Scenario scenario;
    if (options.scenario) {
        scenario = specdiff::mock::scenario_from_json(specdiff::read_json_file(*options.scenario));
    } else {
        scenario.node_count = static_cast<std::uint32_t>(options.nodes.value_or(3));
        scenario.chain.seed = settings.number(options.seed, "SPECDIFF_SEED", "seed", scenario.chain.seed);
    }
    specdiff::mock::Fleet fleet(scenario);
    write_text(options.out, specdiff::fleet_to_json(fleet.endpoints(timeout_of(options, settings))).dump(2) + "\n");
    std::cout.flush();
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(options.duration_ms.value_or(0));
    while (!g_stop && (!options.duration_ms || std::chrono::steady_clock::now() < deadline)) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    fleet.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differential tester for blockchain client APIs"};
    app.require_subcommand(1);
    Common options;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config, "JSON config file (flags and env vars take precedence)");
        sub->add_option("--spec", options.specs, "API spec file (repeatable; bundled specs when omitted)");
        sub->add_option("--semantic-types", options.semantic_types, "Semantic-type sidecar JSON");
    };
    const auto add_fleet = [&](CLI::App* sub) {
        sub->add_option("--fleet", options.fleet, "Endpoint fleet JSON");
        sub->add_option("--scenario", options.scenario, "Mock fleet scenario JSON (spawned in-process)");
        sub->add_option("--timeout-ms", options.timeout_ms, "Per-request timeout");
        sub->add_option("--fact-rules", options.fact_rules, "Fact rule table JSON");
    };
    const auto add_oracle = [&](CLI::App* sub) {
        sub->add_option("--oracle-mode", options.oracle_mode,
                        "stub_false | stub_lookup:<file> | unavailable | external | consensus:<a>+<b>");
        sub->add_option("--oracle-url", options.oracle_url, "Chat-completions base URL");
        sub->add_option("--oracle-model", options.oracle_model, "Model name");
    };
    const auto add_round = [&](CLI::App* sub) {
        sub->add_option("--mix", options.mix, "invalid,valid,semantic per method (default 5,5,10)");
        sub->add_option("--seed", options.seed, "Generation seed");
        sub->add_option("--report-dir", options.report_dir, "Report output directory");
        sub->add_option("--threshold-epochs", options.threshold_epochs, "Finalized epochs required by readiness");
        sub->add_flag("--skip-readiness", options.skip_readiness, "Skip the readiness gate");
        sub->add_flag("--no-filter", options.no_filter, "Report every divergence as genuine");
    };

    auto* annotate = app.add_subcommand("annotate", "Attach consistency policies to a spec");
    add_common(annotate);
    add_oracle(annotate);
    annotate->add_option("--classifier", options.classifier, "rules | rules:<file> | external");
    annotate->add_option("--out", options.out, "Output file (default <spec>.annotated.json)");

    auto* facts = app.add_subcommand("facts", "Harvest live-state facts from a fleet");
    add_common(facts);
    add_fleet(facts);
    facts->add_option("--out", options.out, "Output file (default stdout)");

    auto* generate = app.add_subcommand("generate", "Generate a request batch as JSON Lines");
    add_common(generate);
    generate->add_option("--mix", options.mix, "invalid,valid,semantic per method (default 5,5,10)");
    generate->add_option("--seed", options.seed, "Generation seed");
    generate->add_option("--facts", options.facts, "Fact store JSON");
    generate->add_option("--out", options.out, "Output file (default stdout)");

    auto* run = app.add_subcommand("run", "Generate, dispatch, filter and report");
    add_common(run);
    add_fleet(run);
    add_oracle(run);
    add_round(run);

    auto* replay = app.add_subcommand("replay", "Re-dispatch a round log and re-run the filter");
    add_common(replay);
    add_fleet(replay);
    add_oracle(replay);
    add_round(replay);
    replay->add_option("--roundlog", options.roundlog, "Round log (JSON Lines)")->required();

    auto* mockfleet = app.add_subcommand("mockfleet", "Serve a mock fleet until interrupted");
    mockfleet->add_option("--config", options.config, "JSON config file");
    mockfleet->add_option("--scenario", options.scenario, "Scenario JSON");
    mockfleet->add_option("--nodes", options.nodes, "Node count without a scenario (default 3)");
    mockfleet->add_option("--seed", options.seed, "Chain seed without a scenario");
    mockfleet->add_option("--timeout-ms", options.timeout_ms, "Timeout written into the fleet file");
    mockfleet->add_option("--duration-ms", options.duration_ms, "Stop after this long");
    mockfleet->add_option("--out", options.out, "Write the fleet file here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        Settings settings;
        settings.load(options.config);
        if (annotate->parsed()) return cmd_annotate(options, settings);
        if (facts->parsed()) return cmd_facts(options, settings);
        if (generate->parsed()) return cmd_generate(options, settings);
        if (run->parsed()) return cmd_run(options, settings);
        if (replay->parsed()) return cmd_replay(options, settings);
        if (mockfleet->parsed()) return cmd_mockfleet(options, settings);
    } catch (const specdiff::ReadinessFailure& e) {
        std::cerr << "specdiff: fleet not ready\n";
        for (const auto& failure : e.report().failures) std::cerr << "  " << failure << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "specdiff: " << specdiff::to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "specdiff: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
