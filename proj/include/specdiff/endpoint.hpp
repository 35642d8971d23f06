// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specdiff/spec.hpp"

namespace specdiff {

inline constexpr std::uint32_t kDefaultTimeoutMs = 10'000;

struct Endpoint {
    int endpoint_id = 0;
    std::string label;
    std::string base_url;  // "http://127.0.0.1:8545"
    Layer layer = Layer::kExecution;
    std::uint32_t timeout_ms = kDefaultTimeoutMs;
};

json endpoint_to_json(const Endpoint& endpoint);
Endpoint endpoint_from_json(const json& document);

// Fleet file: JSON array of Endpoint objects. Checks id uniqueness and
// positive timeouts; throws kConfig.
std::vector<Endpoint> fleet_from_json(const json& document);
json fleet_to_json(const std::vector<Endpoint>& fleet);
void check_fleet(const std::vector<Endpoint>& fleet);

std::vector<Endpoint> endpoints_of_layer(const std::vector<Endpoint>& fleet, Layer layer);

}  // namespace specdiff
