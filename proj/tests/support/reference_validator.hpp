// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

// Test-side schema checker. Works on the raw spec documents and uses
// boost::regex, so it shares no code path with the library's validator.

#pragma once

#include <boost/regex.hpp>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace refcheck {

using nlohmann::json;

struct RawParam {
    std::string name;
    bool required = false;
    json schema;
};

class RawSpec {
  public:
    explicit RawSpec(json document) : doc_(std::move(document)) {
        if (doc_.contains("methods")) {
            for (const auto& method : doc_["methods"]) {
                auto& params = methods_[method["name"].get<std::string>()];
                for (const auto& p : method.value("params", json::array())) {
                    params.push_back({p["name"], p.value("required", false), p.value("schema", json::object())});
                }
            }
        }
        if (doc_.contains("paths")) {
            for (const auto& [path, ops] : doc_["paths"].items()) {
                for (const auto& [verb, op] : ops.items()) {
                    auto& params = methods_[op["operationId"].get<std::string>()];
                    for (const auto& p : op.value("parameters", json::array())) {
                        const bool in_path = p.value("in", "query") == "path";
                        params.push_back({p["name"], p.value("required", in_path), p.value("schema", json::object())});
                    }
                    if (op.contains("requestBody")) {
                        const auto& body = op["requestBody"];
                        params.push_back({"body", body.value("required", true),
                                          body["content"]["application/json"]["schema"]});
                    }
                }
            }
        }
    }

    const std::map<std::string, std::vector<RawParam>>& methods() const { return methods_; }

    bool validate(const json& schema, const json& value) const {
        const json& s = resolve(schema);
        if (s.contains("anyOf")) {
            bool any = false;
            for (const auto& branch : s["anyOf"]) any = any || validate(branch, value);
            if (!any) return false;
        }
        if (s.contains("type") && !type_ok(s["type"], value)) return false;
        if (s.contains("enum")) {
            bool found = false;
            for (const auto& option : s["enum"]) found = found || option == value;
            if (!found) return false;
        }
        if (s.contains("pattern") && value.is_string()) {
            const boost::regex re(s["pattern"].get<std::string>(), boost::regex::ECMAScript);
            if (!boost::regex_search(value.get<std::string>(), re)) return false;
        }
        if (value.is_object()) {
            const auto props = s.value("properties", json::object());
            for (const auto& name : s.value("required", json::array())) {
                if (!value.contains(name.get<std::string>())) return false;
            }
            for (const auto& [key, child] : value.items()) {
                if (props.contains(key)) {
                    if (!validate(props[key], child)) return false;
                } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
                    return false;
                }
            }
        }
        if (value.is_array()) {
            if (s.contains("minItems") && value.size() < s["minItems"].get<std::size_t>()) return false;
            if (s.contains("maxItems") && value.size() > s["maxItems"].get<std::size_t>()) return false;
            if (s.contains("items")) {
                for (const auto& item : value) {
                    if (!validate(s["items"], item)) return false;
                }
            }
        }
        return true;
    }

    // Every supplied arg is declared and valid, every required arg present.
    bool args_valid(const std::string& method, const json& args) const {
        const auto& params = methods_.at(method);
        for (const auto& [key, _] : args.items()) {
            bool declared = false;
            for (const auto& p : params) declared = declared || p.name == key;
            if (!declared) return false;
        }
        for (const auto& p : params) {
            if (!args.contains(p.name)) {
                if (p.required) return false;
                continue;
            }
            if (!validate(p.schema, args[p.name])) return false;
        }
        return true;
    }

  private:
    const json& resolve(const json& schema) const {
        const json* current = &schema;
        for (int hops = 0; hops < 32 && current->contains("$ref"); ++hops) {
            const auto ref = (*current)["$ref"].get<std::string>();
            current = &doc_.at(json::json_pointer(ref.substr(1)));
        }
        return *current;
    }

    static bool kind_ok(const std::string& type, const json& value) {
        if (type == "string") return value.is_string();
        if (type == "boolean") return value.is_boolean();
        if (type == "null") return value.is_null();
        if (type == "array") return value.is_array();
        if (type == "object") return value.is_object();
        if (type == "number") return value.is_number();
        if (type == "integer") {
            if (value.is_number_integer()) return true;
            return value.is_number_float() && std::floor(value.get<double>()) == value.get<double>();
        }
        return true;
    }

    static bool type_ok(const json& type, const json& value) {
        if (type.is_string()) return kind_ok(type.get<std::string>(), value);
        for (const auto& t : type) {
            if (kind_ok(t.get<std::string>(), value)) return true;
        }
        return false;
    }

    json doc_;
    std::map<std::string, std::vector<RawParam>> methods_;
};

}  // namespace refcheck
