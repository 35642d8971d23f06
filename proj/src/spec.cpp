// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/spec.hpp"

#include <algorithm>
#include <set>

#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    [[noreturn]] void violation(const std::string& what) { throw Error(ErrorCode::kInvariantViolation, what); }

    RefResolver make_resolver(const json& document) {
        return [&document](std::string_view ref) -> const json* {
            try {
                const json::json_pointer pointer(std::string(ref.substr(1)));
                if (!document.contains(pointer)) return nullptr;
                return &document.at(pointer);
            } catch (const json::exception&) {
                return nullptr;
            }
        };
    }

    bool read_bool(const json& object, const char* key, bool fallback) {
        auto it = object.find(key);
        if (it == object.end()) return fallback;
        if (!it->is_boolean()) violation(std::string(key) + " must be a boolean");
        return it->get<bool>();
    }

    std::optional<std::string> read_optional_string(const json& object, const char* key) {
        auto it = object.find(key);
        if (it == object.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) violation(std::string(key) + " must be a string");
        return it->get<std::string>();
    }

    MethodSpec parse_openrpc_method(const json& doc, const RefResolver& resolver) {
        if (!doc.is_object()) violation("method descriptor must be an object");
        MethodSpec method;
        auto name = read_optional_string(doc, "name");
        if (!name || name->empty()) violation("method descriptor without a name");
        method.name = *name;
        method.summary = read_optional_string(doc, "summary");

        if (auto transport = read_optional_string(doc, "x-transport")) {
            auto parsed = transport_from_string(*transport);
            if (!parsed) violation(method.name + ": unknown x-transport " + *transport);
            method.transport = *parsed;
        }
        method.path_template = read_optional_string(doc, "x-path");

        const ParamLocation default_location =
            method.transport == Transport::kJsonRpcPost ? ParamLocation::kPositional : ParamLocation::kQuery;
        if (auto params = doc.find("params"); params != doc.end()) {
            if (!params->is_array()) violation(method.name + ": params must be an array");
            for (const auto& entry : *params) {
                if (!entry.is_object()) violation(method.name + ": param descriptor must be an object");
                ParamSpec param;
                auto param_name = read_optional_string(entry, "name");
                if (!param_name) violation(method.name + ": param without a name");
                param.name = *param_name;
                param.required = read_bool(entry, "required", false);
                param.semantic_type = read_optional_string(entry, "x-semantic-type");
                param.location = default_location;
                if (auto in = read_optional_string(entry, "x-in")) {
                    auto parsed = location_from_string(*in);
                    if (!parsed) violation(method.name + ": unknown x-in " + *in);
                    param.location = *parsed;
                }
                auto schema = entry.find("schema");
                const std::string where = method.name + "/params/" + param.name;
                param.schema = schema == entry.end() ? make_schema({}) : parse_schema(*schema, where, resolver);
                method.params.push_back(std::move(param));
            }
        }

        method.result = make_schema({});
        if (auto result = doc.find("result"); result != doc.end() && !result->is_null()) {
            if (!result->is_object()) violation(method.name + ": result must be an object");
            if (auto result_name = read_optional_string(*result, "name")) method.result_name = *result_name;
            if (auto schema = result->find("schema"); schema != result->end()) {
                method.result = parse_schema(*schema, method.name + "/result", resolver);
            }
        }
        return method;
    }

    const json* json_body_schema(const json& holder) {
        auto content = holder.find("content");
        if (content == holder.end() || !content->is_object()) return nullptr;
        auto media = content->find("application/json");
        if (media == content->end()) return nullptr;
        auto schema = media->find("schema");
        return schema == media->end() ? nullptr : &*schema;
    }

    MethodSpec parse_rest_operation(const std::string& path, const std::string& verb, const json& op,
                                    const RefResolver& resolver) {
        if (!op.is_object()) violation(path + " " + verb + ": operation must be an object");
        MethodSpec method;
        auto operation_id = read_optional_string(op, "operationId");
        if (!operation_id || operation_id->empty()) violation(path + " " + verb + ": missing operationId");
        method.name = *operation_id;
        method.summary = read_optional_string(op, "summary");
        method.transport = verb == "get" ? Transport::kRestGet : Transport::kRestPost;
        method.path_template = path;

        if (auto params = op.find("parameters"); params != op.end()) {
            if (!params->is_array()) violation(method.name + ": parameters must be an array");
            for (const auto& entry : *params) {
                ParamSpec param;
                auto param_name = read_optional_string(entry, "name");
                if (!param_name) violation(method.name + ": parameter without a name");
                param.name = *param_name;
                auto in = read_optional_string(entry, "in").value_or("query");
                if (in == "path") {
                    param.location = ParamLocation::kPath;
                } else if (in == "query") {
                    param.location = ParamLocation::kQuery;
                } else {
                    throw Error(ErrorCode::kUnsupportedConstruct,
                                "unsupported parameter location '" + in + "' at " + method.name + "/" + param.name);
                }
                param.required = read_bool(entry, "required", param.location == ParamLocation::kPath);
                param.semantic_type = read_optional_string(entry, "x-semantic-type");
                auto schema = entry.find("schema");
                const std::string where = method.name + "/params/" + param.name;
                param.schema = schema == entry.end() ? make_schema({}) : parse_schema(*schema, where, resolver);
                method.params.push_back(std::move(param));
            }
        }
        if (auto body = op.find("requestBody"); body != op.end()) {
            ParamSpec param;
            param.name = "body";
            param.location = ParamLocation::kBody;
            param.required = read_bool(*body, "required", true);
            param.semantic_type = read_optional_string(*body, "x-semantic-type");
            const json* schema = json_body_schema(*body);
            param.schema = schema ? parse_schema(*schema, method.name + "/requestBody", resolver) : make_schema({});
            method.params.push_back(std::move(param));
        }

        method.result = make_schema({});
        method.result_name = "response";
        if (auto responses = op.find("responses"); responses != op.end() && responses->is_object()) {
            for (const auto& [status, response] : responses->items()) {
                if (!status.starts_with("2")) continue;
                if (const json* schema = json_body_schema(response)) {
                    method.result = parse_schema(*schema, method.name + "/responses/" + status, resolver);
                }
                break;
            }
        }
        return method;
    }

    void insert_method(ApiSpec& spec, MethodSpec method) {
        check_method(method);
        const auto name = method.name;
        if (!spec.methods.emplace(name, std::move(method)).second) violation("duplicate method name " + name);
    }

    json param_to_json(const ParamSpec& param, Transport transport) {
        json out = {{"name", param.name}, {"required", param.required}, {"schema", schema_to_json(*param.schema)}};
        const ParamLocation default_location =
            transport == Transport::kJsonRpcPost ? ParamLocation::kPositional : ParamLocation::kQuery;
        if (param.location != default_location) out["x-in"] = to_string(param.location);
        if (param.semantic_type) out["x-semantic-type"] = *param.semantic_type;
        return out;
    }

}  // namespace

std::string_view to_string(Transport transport) {
    switch (transport) {
        case Transport::kJsonRpcPost: return "jsonrpc_post";
        case Transport::kRestGet: return "rest_get";
        case Transport::kRestPost: return "rest_post";
    }
    return "jsonrpc_post";
}

std::optional<Transport> transport_from_string(std::string_view text) {
    if (text == "jsonrpc_post") return Transport::kJsonRpcPost;
    if (text == "rest_get") return Transport::kRestGet;
    if (text == "rest_post") return Transport::kRestPost;
    return std::nullopt;
}

std::string_view to_string(Layer layer) { return layer == Layer::kExecution ? "EL" : "CL"; }

std::optional<Layer> layer_from_string(std::string_view text) {
    if (text == "EL") return Layer::kExecution;
    if (text == "CL") return Layer::kConsensus;
    return std::nullopt;
}

std::string_view to_string(ParamLocation location) {
    switch (location) {
        case ParamLocation::kPositional: return "positional";
        case ParamLocation::kPath: return "path";
        case ParamLocation::kQuery: return "query";
        case ParamLocation::kBody: return "body";
    }
    return "positional";
}

std::optional<ParamLocation> location_from_string(std::string_view text) {
    if (text == "positional") return ParamLocation::kPositional;
    if (text == "path") return ParamLocation::kPath;
    if (text == "query") return ParamLocation::kQuery;
    if (text == "body") return ParamLocation::kBody;
    return std::nullopt;
}

const ParamSpec* MethodSpec::param(std::string_view param_name) const {
    for (const auto& p : params) {
        if (p.name == param_name) return &p;
    }
    return nullptr;
}

std::vector<std::string> MethodSpec::path_placeholders() const {
    std::vector<std::string> names;
    if (!path_template) return names;
    const auto& path = *path_template;
    std::size_t pos = 0;
    while ((pos = path.find('{', pos)) != std::string::npos) {
        const auto end = path.find('}', pos);
        if (end == std::string::npos) violation(name + ": unterminated placeholder in " + path);
        names.push_back(path.substr(pos + 1, end - pos - 1));
        pos = end + 1;
    }
    return names;
}

const MethodSpec* ApiSpec::method(std::string_view name) const {
    auto it = methods.find(name);
    return it == methods.end() ? nullptr : &it->second;
}

bool operator==(const ParamSpec& a, const ParamSpec& b) {
    return a.name == b.name && a.required == b.required && a.location == b.location &&
           a.semantic_type == b.semantic_type && *a.schema == *b.schema;
}

bool operator==(const MethodSpec& a, const MethodSpec& b) {
    return a.name == b.name && a.transport == b.transport && a.path_template == b.path_template &&
           a.params == b.params && a.result_name == b.result_name && *a.result == *b.result &&
           a.summary == b.summary;
}

bool operator==(const ApiSpec& a, const ApiSpec& b) { return a.methods == b.methods; }

void check_method(const MethodSpec& method) {
    std::set<std::string> names;
    for (const auto& param : method.params) {
        if (!names.insert(param.name).second) violation(method.name + ": duplicate param name " + param.name);
        if (!param.schema) violation(method.name + ": param " + param.name + " has no schema");
        const bool rest_location = param.location != ParamLocation::kPositional;
        if (rest_location != is_rest(method.transport)) {
            violation(method.name + ": param " + param.name + " location does not fit transport");
        }
        if (param.location == ParamLocation::kBody && method.transport != Transport::kRestPost) {
            violation(method.name + ": body param on a non-POST method");
        }
    }
    if (is_rest(method.transport) != method.path_template.has_value()) {
        violation(method.name + ": path template must be present exactly for REST transports");
    }
    const auto placeholders = method.path_placeholders();
    std::set<std::string> seen;
    for (const auto& placeholder : placeholders) {
        if (!seen.insert(placeholder).second) violation(method.name + ": placeholder repeated: " + placeholder);
        const ParamSpec* param = method.param(placeholder);
        if (param == nullptr) violation(method.name + ": placeholder {" + placeholder + "} names no param");
        if (param->location != ParamLocation::kPath) {
            violation(method.name + ": placeholder {" + placeholder + "} bound to a non-path param");
        }
    }
    for (const auto& param : method.params) {
        if (param.location == ParamLocation::kPath && !seen.contains(param.name)) {
            violation(method.name + ": path param " + param.name + " missing from path template");
        }
    }
    if (!method.result) violation(method.name + ": missing result schema");
}

ApiSpec parse_spec(std::string_view document, const std::string& source_label) {
    json parsed;
    try {
        parsed = json::parse(document);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kParse, "malformed JSON in " + (source_label.empty() ? "<document>" : source_label) +
                                           " at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return parse_spec_json(parsed, source_label);
}

ApiSpec parse_spec_json(const json& document, const std::string& source_label) {
    if (!document.is_object()) throw Error(ErrorCode::kParse, "specification document must be a JSON object");
    ApiSpec spec;
    spec.source_label = source_label;
    if (auto info = document.find("info"); info != document.end() && info->is_object()) {
        spec.title = info->value("title", "");
    }
    const RefResolver resolver = make_resolver(document);

    if (auto methods = document.find("methods"); methods != document.end()) {
        if (!methods->is_array()) throw Error(ErrorCode::kParse, "\"methods\" must be an array");
        for (const auto& entry : *methods) insert_method(spec, parse_openrpc_method(entry, resolver));
        return spec;
    }
    if (auto paths = document.find("paths"); paths != document.end()) {
        if (!paths->is_object()) throw Error(ErrorCode::kParse, "\"paths\" must be an object");
        for (const auto& [path, item] : paths->items()) {
            for (const auto& [verb, op] : item.items()) {
                if (verb != "get" && verb != "post") {
                    throw Error(ErrorCode::kUnsupportedConstruct, "unsupported HTTP verb " + verb + " at " + path);
                }
                insert_method(spec, parse_rest_operation(path, verb, op, resolver));
            }
        }
        return spec;
    }
    throw Error(ErrorCode::kParse, "document has neither \"methods\" nor \"paths\"");
}

json spec_to_json(const ApiSpec& spec) {
    json methods = json::array();
    for (const auto& [name, method] : spec.methods) {
        json out = {{"name", name}};
        if (method.summary) out["summary"] = *method.summary;
        if (method.transport != Transport::kJsonRpcPost) out["x-transport"] = to_string(method.transport);
        if (method.path_template) out["x-path"] = *method.path_template;
        json params = json::array();
        for (const auto& param : method.params) params.push_back(param_to_json(param, method.transport));
        out["params"] = std::move(params);
        out["result"] = {{"name", method.result_name}, {"schema", schema_to_json(*method.result)}};
        methods.push_back(std::move(out));
    }
    return {{"openrpc", "1.2.6"}, {"info", {{"title", spec.title.empty() ? spec.source_label : spec.title}, {"version", "1"}}}, {"methods", methods}};
}

ApiSpec apply_semantic_types(ApiSpec spec, const json& sidecar) {
    if (!sidecar.is_object()) throw Error(ErrorCode::kConfig, "semantic-type sidecar must be a JSON object");
    for (const auto& [method_name, params] : sidecar.items()) {
        auto it = spec.methods.find(method_name);
        if (it == spec.methods.end()) continue;  // sidecars may cover several specs
        if (!params.is_object()) throw Error(ErrorCode::kConfig, "sidecar entry for " + method_name + " must be an object");
        for (const auto& [param_name, type] : params.items()) {
            auto param = std::find_if(it->second.params.begin(), it->second.params.end(),
                                      [&](const ParamSpec& p) { return p.name == param_name; });
            if (param == it->second.params.end()) {
                throw Error(ErrorCode::kConfig, "sidecar names unknown param " + method_name + "/" + param_name);
            }
            if (!type.is_string()) throw Error(ErrorCode::kConfig, "semantic type must be a string");
            param->semantic_type = type.get<std::string>();
        }
    }
    return spec;
}

ApiSpec merge_specs(const std::vector<ApiSpec>& specs) {
    ApiSpec merged;
    for (const auto& spec : specs) {
        if (!merged.source_label.empty() && !spec.source_label.empty()) merged.source_label += ",";
        merged.source_label += spec.source_label;
        if (merged.title.empty()) merged.title = spec.title;
        for (const auto& [name, method] : spec.methods) {
            if (!merged.methods.emplace(name, method).second) violation("duplicate method name " + name);
        }
    }
    return merged;
}

std::string percent_encode(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

std::string resolve_path(const std::string& path_template, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < path_template.size()) {
        const auto open = path_template.find('{', pos);
        if (open == std::string::npos) {
            out += path_template.substr(pos);
            break;
        }
        const auto close = path_template.find('}', open);
        out += path_template.substr(pos, open - pos);
        const auto name = path_template.substr(open + 1, close - open - 1);
        if (auto it = values.find(name); it != values.end()) out += percent_encode(it->second);
        pos = close + 1;
    }
    return out;
}

}  // namespace specdiff
