// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/endpoint.hpp"

#include <algorithm>
#include <set>

#include "specdiff/error.hpp"

namespace specdiff {

json endpoint_to_json(const Endpoint& endpoint) {
    return {{"endpoint_id", endpoint.endpoint_id}, {"label", endpoint.label},       {"base_url", endpoint.base_url},
            {"layer", to_string(endpoint.layer)},  {"timeout_ms", endpoint.timeout_ms}};
}

Endpoint endpoint_from_json(const json& document) {
    try {
        Endpoint endpoint;
        endpoint.endpoint_id = document.at("endpoint_id").get<int>();
        endpoint.label = document.value("label", "endpoint-" + std::to_string(endpoint.endpoint_id));
        endpoint.base_url = document.at("base_url").get<std::string>();
        auto layer = layer_from_string(document.value("layer", "EL"));
        if (!layer) throw Error(ErrorCode::kConfig, "endpoint layer must be EL or CL: " + document.dump());
        endpoint.layer = *layer;
        const auto timeout = document.value("timeout_ms", static_cast<std::int64_t>(kDefaultTimeoutMs));
        if (timeout <= 0) throw Error(ErrorCode::kConfig, "timeout_ms must be positive: " + document.dump());
        endpoint.timeout_ms = static_cast<std::uint32_t>(timeout);
        return endpoint;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kConfig, std::string("malformed endpoint: ") + e.what());
    }
}

std::vector<Endpoint> fleet_from_json(const json& document) {
    if (!document.is_array()) throw Error(ErrorCode::kConfig, "fleet file must be a JSON array of endpoints");
    std::vector<Endpoint> fleet;
    for (const auto& entry : document) fleet.push_back(endpoint_from_json(entry));
    check_fleet(fleet);
    return fleet;
}

json fleet_to_json(const std::vector<Endpoint>& fleet) {
    json out = json::array();
    for (const auto& endpoint : fleet) out.push_back(endpoint_to_json(endpoint));
    return out;
}

void check_fleet(const std::vector<Endpoint>& fleet) {
    std::set<int> ids;
    for (const auto& endpoint : fleet) {
        if (!ids.insert(endpoint.endpoint_id).second) {
            throw Error(ErrorCode::kConfig, "duplicate endpoint_id " + std::to_string(endpoint.endpoint_id));
        }
        if (endpoint.timeout_ms == 0) throw Error(ErrorCode::kConfig, "timeout_ms must be positive");
    }
}

std::vector<Endpoint> endpoints_of_layer(const std::vector<Endpoint>& fleet, Layer layer) {
    std::vector<Endpoint> out;
    std::copy_if(fleet.begin(), fleet.end(), std::back_inserter(out),
                 [layer](const Endpoint& e) { return e.layer == layer; });
    std::sort(out.begin(), out.end(), [](const Endpoint& a, const Endpoint& b) { return a.endpoint_id < b.endpoint_id; });
    return out;
}

}  // namespace specdiff
