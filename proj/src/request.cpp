// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/request.hpp"

#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    std::string as_text(const json& value) { return value.is_string() ? value.get<std::string>() : value.dump(); }

    void append_query(std::string& path, const std::string& key, const json& value) {
        path += path.find('?') == std::string::npos ? '?' : '&';
        path += percent_encode(key) + "=" + percent_encode(as_text(value));
    }

}  // namespace

std::string_view to_string(Validity validity) {
    switch (validity) {
        case Validity::kSyntacticInvalid: return "syntactic_invalid";
        case Validity::kSyntacticValid: return "syntactic_valid";
        case Validity::kSemanticValid: return "semantic_valid";
    }
    return "syntactic_valid";
}

std::optional<Validity> validity_from_string(std::string_view text) {
    if (text == "syntactic_invalid") return Validity::kSyntacticInvalid;
    if (text == "syntactic_valid") return Validity::kSyntacticValid;
    if (text == "semantic_valid") return Validity::kSemanticValid;
    return std::nullopt;
}

std::string_view to_string(InvalidCategory category) {
    switch (category) {
        case InvalidCategory::kUndefinedField: return "undefined_field";
        case InvalidCategory::kMissingRequired: return "missing_required";
        case InvalidCategory::kConstraintViolation: return "constraint_violation";
    }
    return "undefined_field";
}

std::optional<InvalidCategory> category_from_string(std::string_view text) {
    for (auto category : kAllCategories) {
        if (to_string(category) == text) return category;
    }
    return std::nullopt;
}

bool operator==(const TestRequest& a, const TestRequest& b) { return request_to_json(a) == request_to_json(b); }

void build_wire(TestRequest& request, const MethodSpec& method) {
    request.transport = method.transport;
    if (method.transport == Transport::kJsonRpcPost) {
        json params = json::array();
        for (const auto& param : method.params) {
            auto it = request.args.find(param.name);
            if (it == request.args.end()) break;  // positional: nothing after a gap
            params.push_back(*it);
        }
        for (const auto& extra : request.extra_positional) params.push_back(extra);
        request.path.reset();
        request.body = {{"id", request.request_id}, {"jsonrpc", "2.0"}, {"method", method.name}, {"params", params}};
        return;
    }

    std::map<std::string, std::string> path_values;
    for (const auto& param : method.params) {
        if (param.location != ParamLocation::kPath) continue;
        auto it = request.args.find(param.name);
        path_values[param.name] = it == request.args.end() ? std::string() : as_text(*it);
    }
    std::string path = resolve_path(*method.path_template, path_values);
    for (const auto& param : method.params) {
        if (param.location != ParamLocation::kQuery) continue;
        if (auto it = request.args.find(param.name); it != request.args.end()) append_query(path, param.name, *it);
    }
    for (const auto& [key, value] : request.extra_query.items()) append_query(path, key, value);
    request.path = std::move(path);

    request.body = nullptr;
    if (method.transport == Transport::kRestPost) {
        for (const auto& param : method.params) {
            if (param.location != ParamLocation::kBody) continue;
            if (auto it = request.args.find(param.name); it != request.args.end()) request.body = *it;
        }
        if (!request.extra_body.empty()) {
            if (request.body.is_null()) request.body = json::object();
            for (const auto& [key, value] : request.extra_body.items()) request.body[key] = value;
        }
    }
}

std::string wire_body(const TestRequest& request) {
    if (request.transport == Transport::kRestGet) return {};
    if (request.transport == Transport::kRestPost && request.body.is_null()) return {};
    return request.body.dump();
}

json request_to_json(const TestRequest& request) {
    json out = {
        {"request_id", request.request_id},
        {"method", request.method},
        {"transport", to_string(request.transport)},
        {"body", request.body},
        {"args", request.args},
        {"validity", to_string(request.validity)},
        {"seed", request.seed},
    };
    if (request.path) out["path"] = *request.path;
    if (request.category) out["category"] = to_string(*request.category);
    if (request.fault_note) out["fault_note"] = *request.fault_note;
    if (!request.provenance.empty()) out["provenance"] = request.provenance;
    if (!request.extra_positional.empty()) out["extra_positional"] = request.extra_positional;
    if (!request.extra_query.empty()) out["extra_query"] = request.extra_query;
    if (!request.extra_body.empty()) out["extra_body"] = request.extra_body;
    return out;
}

TestRequest request_from_json(const json& document) {
    try {
        TestRequest request;
        request.request_id = document.at("request_id").get<std::uint64_t>();
        request.method = document.at("method").get<std::string>();
        auto transport = transport_from_string(document.at("transport").get<std::string>());
        auto validity = validity_from_string(document.at("validity").get<std::string>());
        if (!transport || !validity) throw Error(ErrorCode::kParse, "bad transport or validity in request");
        request.transport = *transport;
        request.validity = *validity;
        request.body = document.at("body");
        request.args = document.value("args", json::object());
        request.seed = document.at("seed").get<std::uint64_t>();
        if (document.contains("path")) request.path = document["path"].get<std::string>();
        if (document.contains("category")) request.category = category_from_string(document["category"].get<std::string>());
        if (document.contains("fault_note")) request.fault_note = document["fault_note"].get<std::string>();
        request.provenance = document.value("provenance", std::vector<std::string>{});
        request.extra_positional = document.value("extra_positional", json::array());
        request.extra_query = document.value("extra_query", json::object());
        request.extra_body = document.value("extra_body", json::object());
        return request;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("malformed request record: ") + e.what());
    }
}

std::vector<std::string> failing_params(const MethodSpec& method, const json& args) {
    std::vector<std::string> failing;
    for (const auto& param : method.params) {
        auto it = args.find(param.name);
        if (it == args.end()) {
            if (param.required) failing.push_back(param.name);
            continue;
        }
        if (!validate_value(*param.schema, *it)) failing.push_back(param.name);
    }
    return failing;
}

}  // namespace specdiff
