// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/harness.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "specdiff/http.hpp"

namespace specdiff {

namespace {

    std::optional<std::uint64_t> read_count(const json& value) {
        if (value.is_number_unsigned()) return value.get<std::uint64_t>();
        if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::uint64_t>();
        if (value.is_string()) {
            const auto& text = value.get_ref<const std::string&>();
            try {
                std::size_t used = 0;
                const auto n = text.starts_with("0x") ? std::stoull(text.substr(2), &used, 16) : std::stoull(text, &used);
                if (used == (text.starts_with("0x") ? text.size() - 2 : text.size())) return n;
            } catch (const std::exception&) {
            }
        }
        return std::nullopt;
    }

    std::optional<json> fetch_json(const Endpoint& endpoint, const std::string& verb, const std::string& path,
                                   const std::string& body) {
        auto result = http::send(endpoint.base_url, verb, path, body, endpoint.timeout_ms);
        if (!result.response || result.response->status != 200) return std::nullopt;
        auto parsed = json::parse(result.response->body, nullptr, false);
        if (parsed.is_discarded()) return std::nullopt;
        return parsed;
    }

    std::optional<json> rpc(const Endpoint& endpoint, const std::string& method) {
        const json body = {{"id", 1}, {"jsonrpc", "2.0"}, {"method", method}, {"params", json::array()}};
        auto reply = fetch_json(endpoint, "POST", "/", body.dump());
        if (!reply || !reply->contains("result")) return std::nullopt;
        return (*reply)["result"];
    }

    EndpointReadiness probe(const Endpoint& endpoint) {
        EndpointReadiness status;
        status.endpoint_id = endpoint.endpoint_id;
        status.label = endpoint.label;
        status.layer = endpoint.layer;

        // Mock nodes expose a control endpoint; real nodes answer the standard
        // syncing and finality queries.
        if (auto control = fetch_json(endpoint, "GET", "/__control/status", {}); control && control->is_object()) {
            status.reachable = true;
            const char* key = endpoint.layer == Layer::kConsensus && control->contains("head_slot") ? "head_slot" : "height";
            status.head_height = read_count(control->value(key, json()));
            status.finalized_epochs = read_count(control->value("finalized_epochs", json()));
            status.syncing = control->value("syncing", false);
            return status;
        }
        if (endpoint.layer == Layer::kExecution) {
            auto height = rpc(endpoint, "eth_blockNumber");
            if (!height) return status;
            status.reachable = true;
            status.head_height = read_count(*height);
            if (auto syncing = rpc(endpoint, "eth_syncing")) status.syncing = !(syncing->is_boolean() && !syncing->get<bool>());
            return status;
        }
        auto syncing = fetch_json(endpoint, "GET", "/eth/v1/node/syncing", {});
        if (!syncing) return status;
        status.reachable = true;
        const auto& data = (*syncing)["data"];
        status.head_height = read_count(data.value("head_slot", json()));
        status.syncing = data.value("is_syncing", false);
        if (auto finality = fetch_json(endpoint, "GET", "/eth/v1/beacon/states/head/finality_checkpoints", {})) {
            const json::json_pointer epoch_ptr("/data/finalized/epoch");
            if (finality->contains(epoch_ptr)) status.finalized_epochs = read_count(finality->at(epoch_ptr));
        }
        return status;
    }

    ResponseRecord send_one(const TestRequest& request, const std::string& body, const Endpoint& endpoint) {
        ResponseRecord record;
        record.endpoint_id = endpoint.endpoint_id;
        record.request_id = request.request_id;
        const std::string verb = request.transport == Transport::kRestGet ? "GET" : "POST";
        auto result = http::send(endpoint.base_url, verb, request.path.value_or("/"), body, endpoint.timeout_ms);
        record.latency_ms = result.latency_ms;
        if (!result.response) {
            record.transport_error =
                result.failure == http::Failure::kTimeout ? TransportError::kTimeout : TransportError::kConnectFailure;
            return record;
        }
        record.http_status = result.response->status;
        record.raw_body = result.response->body;
        auto parsed = json::parse(record.raw_body, nullptr, false);
        if (parsed.is_discarded()) {
            record.transport_error = TransportError::kNonJson;
        } else {
            record.body = std::move(parsed);
        }
        return record;
    }

}  // namespace

std::string_view to_string(TransportError error) {
    switch (error) {
        case TransportError::kTimeout: return "timeout";
        case TransportError::kConnectFailure: return "connect_failure";
        case TransportError::kNonJson: return "non_json";
    }
    return "timeout";
}

std::optional<TransportError> transport_error_from_string(std::string_view text) {
    if (text == "timeout") return TransportError::kTimeout;
    if (text == "connect_failure") return TransportError::kConnectFailure;
    if (text == "non_json") return TransportError::kNonJson;
    return std::nullopt;
}

json record_to_json(const ResponseRecord& record) {
    json out = {{"endpoint_id", record.endpoint_id},
                {"request_id", record.request_id},
                {"raw_body", base64_encode(record.raw_body)},
                {"latency_ms", record.latency_ms}};
    if (record.http_status) out["http_status"] = *record.http_status;
    if (record.body) out["body"] = *record.body;
    if (record.transport_error) out["transport_error"] = to_string(*record.transport_error);
    return out;
}

ResponseRecord record_from_json(const json& document) {
    try {
        ResponseRecord record;
        record.endpoint_id = document.at("endpoint_id").get<int>();
        record.request_id = document.at("request_id").get<std::uint64_t>();
        record.raw_body = base64_decode(document.value("raw_body", ""));
        record.latency_ms = document.value("latency_ms", 0.0);
        if (document.contains("http_status")) record.http_status = document["http_status"].get<int>();
        if (document.contains("body")) record.body = document["body"];
        if (document.contains("transport_error")) {
            record.transport_error = transport_error_from_string(document["transport_error"].get<std::string>());
        }
        return record;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("malformed response record: ") + e.what());
    }
}

bool ReadinessReport::is_syncing(int endpoint_id) const {
    return std::any_of(endpoints.begin(), endpoints.end(),
                       [&](const EndpointReadiness& e) { return e.endpoint_id == endpoint_id && e.syncing; });
}

json readiness_to_json(const ReadinessReport& report) {
    json endpoints = json::array();
    for (const auto& e : report.endpoints) {
        json entry = {{"endpoint_id", e.endpoint_id}, {"label", e.label}, {"layer", to_string(e.layer)},
                      {"reachable", e.reachable},     {"syncing", e.syncing}};
        entry["head_height"] = e.head_height ? json(*e.head_height) : json();
        entry["finalized_epochs"] = e.finalized_epochs ? json(*e.finalized_epochs) : json();
        endpoints.push_back(std::move(entry));
    }
    return {{"ready", report.ready}, {"failures", report.failures}, {"endpoints", endpoints}};
}

ReadinessReport check_readiness(const std::vector<Endpoint>& fleet, std::uint64_t threshold_epochs) {
    if (fleet.empty()) throw Error(ErrorCode::kConfig, "readiness check needs a non-empty fleet");
    ReadinessReport report;
    std::vector<std::future<EndpointReadiness>> probes;
    for (const auto& endpoint : fleet) probes.push_back(std::async(std::launch::async, probe, std::cref(endpoint)));
    for (auto& p : probes) report.endpoints.push_back(p.get());
    std::sort(report.endpoints.begin(), report.endpoints.end(),
              [](const auto& a, const auto& b) { return a.endpoint_id < b.endpoint_id; });

    std::map<Layer, std::optional<std::uint64_t>> heights;
    for (const auto& e : report.endpoints) {
        if (!e.reachable) {
            report.failures.push_back("unreachable: " + e.label);
            continue;
        }
        if (!e.head_height) {
            report.failures.push_back("unknown head height: " + e.label);
            continue;
        }
        auto& reference = heights[e.layer];
        if (!reference) {
            reference = e.head_height;
        } else if (*reference != *e.head_height) {
            report.failures.push_back("height mismatch: " + e.label + " at " + std::to_string(*e.head_height) +
                                      ", expected " + std::to_string(*reference));
        }
        if (e.layer == Layer::kConsensus && e.finalized_epochs.value_or(0) < threshold_epochs) {
            report.failures.push_back("finality below threshold: " + e.label + " finalized " +
                                      std::to_string(e.finalized_epochs.value_or(0)) + " < " +
                                      std::to_string(threshold_epochs));
        }
    }
    report.ready = report.failures.empty();
    return report;
}

ReadinessFailure::ReadinessFailure(ReadinessReport report)
    : Error(ErrorCode::kReadiness, [&] {
          std::string message = "fleet not ready";
          for (const auto& failure : report.failures) message += "; " + failure;
          return message;
      }()),
      report_(std::move(report)) {}

std::vector<ResponseRecord> dispatch(const TestRequest& request, const std::vector<Endpoint>& fleet) {
    const Layer layer = layer_of(request.transport);
    for (const auto& endpoint : fleet) {
        if (endpoint.layer != layer) {
            throw Error(ErrorCode::kConfig, "request " + std::to_string(request.request_id) + " (" + request.method +
                                                ") targets " + std::string(to_string(layer)) + " but endpoint " +
                                                endpoint.label + " is " + std::string(to_string(endpoint.layer)));
        }
    }
    const std::string body = wire_body(request);
    std::vector<std::future<ResponseRecord>> pending;
    pending.reserve(fleet.size());
    for (const auto& endpoint : fleet) {
        pending.push_back(std::async(std::launch::async, send_one, std::cref(request), std::cref(body), std::cref(endpoint)));
    }
    std::vector<ResponseRecord> records;
    records.reserve(fleet.size());
    for (auto& p : pending) records.push_back(p.get());
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.endpoint_id < b.endpoint_id; });
    return records;
}

RoundLog run_round(const ApiSpec& spec, const std::vector<Endpoint>& fleet, const std::vector<TestRequest>& batch,
                   const RoundOptions& options) {
    check_fleet(fleet);
    RoundLog log;
    if (!options.skip_readiness && !fleet.empty()) {
        log.readiness = check_readiness(fleet, options.threshold_epochs);
        if (!log.readiness->ready) throw ReadinessFailure(*log.readiness);
    }
    const auto el = endpoints_of_layer(fleet, Layer::kExecution);
    const auto cl = endpoints_of_layer(fleet, Layer::kConsensus);
    for (const auto& request : batch) {
        const MethodSpec* method = spec.method(request.method);
        if (method == nullptr) throw Error(ErrorCode::kConfig, "request for unknown method " + request.method);
        if (method->transport != request.transport) {
            throw Error(ErrorCode::kConfig, "request transport does not match method " + request.method);
        }
        if ((request.transport == Transport::kJsonRpcPost ? el : cl).empty()) {
            throw Error(ErrorCode::kConfig, "no " + std::string(to_string(method->layer())) + " endpoint for " +
                                                request.method);
        }
    }

    log.entries.resize(batch.size());
    const std::size_t window = std::max<std::uint32_t>(options.max_in_flight, 1);
    for (std::size_t start = 0; start < batch.size(); start += window) {
        const std::size_t end = std::min(batch.size(), start + window);
        std::vector<std::future<std::vector<ResponseRecord>>> pending;
        for (std::size_t i = start; i < end; ++i) {
            const auto& targets = batch[i].transport == Transport::kJsonRpcPost ? el : cl;
            pending.push_back(std::async(window == 1 ? std::launch::deferred : std::launch::async, dispatch,
                                         std::cref(batch[i]), std::cref(targets)));
        }
        for (std::size_t i = start; i < end; ++i) {
            log.entries[i].request = batch[i];
            log.entries[i].records = pending[i - start].get();
        }
    }
    return log;
}

std::string roundlog_to_jsonl(const RoundLog& log) {
    std::string out;
    for (const auto& entry : log.entries) {
        json records = json::array();
        for (const auto& record : entry.records) records.push_back(record_to_json(record));
        out += json{{"request", request_to_json(entry.request)}, {"records", records}}.dump();
        out.push_back('\n');
    }
    return out;
}

RoundLog roundlog_from_jsonl(const std::string& text) {
    RoundLog log;
    std::stringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        auto parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) throw Error(ErrorCode::kParse, "malformed round-log line");
        RoundEntry entry;
        entry.request = request_from_json(parsed.at("request"));
        for (const auto& record : parsed.at("records")) entry.records.push_back(record_from_json(record));
        log.entries.push_back(std::move(entry));
    }
    return log;
}

std::string base64_encode(std::string_view bytes) {
    if (bytes.empty()) return {};
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                        reinterpret_cast<const unsigned char*>(bytes.data()),
                                        static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(written));
    return out;
}

std::string base64_decode(std::string_view text) {
    if (text.empty()) return {};
    if (text.size() % 4 != 0) throw Error(ErrorCode::kParse, "base64 text length is not a multiple of 4");
    std::string out(3 * text.size() / 4, '\0');
    const int written = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                        reinterpret_cast<const unsigned char*>(text.data()),
                                        static_cast<int>(text.size()));
    if (written < 0) throw Error(ErrorCode::kParse, "invalid base64 text");
    std::size_t padding = 0;
    if (text.ends_with("==")) {
        padding = 2;
    } else if (text.ends_with("=")) {
        padding = 1;
    }
    out.resize(static_cast<std::size_t>(written) - padding);
    return out;
}

}  // namespace specdiff
