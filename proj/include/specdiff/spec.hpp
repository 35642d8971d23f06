// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specdiff/schema.hpp"

namespace specdiff {

enum class Transport { kJsonRpcPost, kRestGet, kRestPost };

// Client family. JSON-RPC methods are served by execution-layer endpoints,
// REST methods by consensus-layer (beacon) endpoints.
enum class Layer { kExecution, kConsensus };

enum class ParamLocation { kPositional, kPath, kQuery, kBody };

std::string_view to_string(Transport transport);
std::optional<Transport> transport_from_string(std::string_view text);
std::string_view to_string(Layer layer);
std::optional<Layer> layer_from_string(std::string_view text);
std::string_view to_string(ParamLocation location);
std::optional<ParamLocation> location_from_string(std::string_view text);

inline bool is_rest(Transport transport) { return transport != Transport::kJsonRpcPost; }
inline Layer layer_of(Transport transport) { return is_rest(transport) ? Layer::kConsensus : Layer::kExecution; }

struct ParamSpec {
    std::string name;
    bool required = false;
    SchemaPtr schema;
    ParamLocation location = ParamLocation::kPositional;
    // Binding to a live-state fact type ("address", "block_number", ...).
    std::optional<std::string> semantic_type;
};

struct MethodSpec {
    std::string name;
    Transport transport = Transport::kJsonRpcPost;
    std::optional<std::string> path_template;
    std::vector<ParamSpec> params;
    std::string result_name = "result";
    SchemaPtr result;
    std::optional<std::string> summary;

    Layer layer() const { return layer_of(transport); }
    const ParamSpec* param(std::string_view param_name) const;
    std::vector<std::string> path_placeholders() const;
};

struct ApiSpec {
    std::map<std::string, MethodSpec, std::less<>> methods;
    std::string source_label;
    std::string title;  // info.title of the document; kept across serialization

    const MethodSpec* method(std::string_view name) const;
};

bool operator==(const ParamSpec& a, const ParamSpec& b);
bool operator==(const MethodSpec& a, const MethodSpec& b);
bool operator==(const ApiSpec& a, const ApiSpec& b);

// Parses an OpenRPC-shaped ("methods") or REST-shaped ("paths") document into
// an ApiSpec. Throws Error with kParse, kUnsupportedConstruct or
// kInvariantViolation.
ApiSpec parse_spec(std::string_view document, const std::string& source_label = {});
ApiSpec parse_spec_json(const json& document, const std::string& source_label = {});

// Throws kInvariantViolation when a MethodSpec breaks its invariants.
void check_method(const MethodSpec& method);

// Neutral serialization: an OpenRPC-shaped document with x- extensions for
// transport, path template, parameter location and semantic type.
json spec_to_json(const ApiSpec& spec);

// Applies a sidecar {method: {param: semantic_type}}. Unknown methods or
// params are a config error.
ApiSpec apply_semantic_types(ApiSpec spec, const json& sidecar);

// Union of several specs; duplicate method names are an invariant violation.
ApiSpec merge_specs(const std::vector<ApiSpec>& specs);

// Replaces {placeholder} segments with percent-encoded values.
std::string resolve_path(const std::string& path_template, const std::map<std::string, std::string>& values);

std::string percent_encode(std::string_view text);

}  // namespace specdiff
