// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

// Naive two-document comparator used as the oracle for the structural diff.

#pragma once

#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace refcheck {

using DiffSet = std::set<std::pair<std::string, std::string>>;  // (path, kind)

inline std::string pointer_token(std::string key) {
    std::string out;
    for (char c : key) out += c == '~' ? std::string("~0") : c == '/' ? std::string("~1") : std::string(1, c);
    return out;
}

inline const char* type_tag(const nlohmann::json& v) {
    if (v.is_null()) return "null";
    if (v.is_boolean()) return "bool";
    if (v.is_number()) return "number";
    if (v.is_string()) return "string";
    if (v.is_array()) return "array";
    return "object";
}

inline void brute_diff(const nlohmann::json& a, const nlohmann::json& b, const std::string& path, DiffSet& out) {
    const std::string here = path.empty() ? "/" : path;
    if (std::string(type_tag(a)) != type_tag(b)) {
        out.insert({here, "type_mismatch"});
        return;
    }
    if (a.is_object()) {
        std::set<std::string> keys;
        for (auto it = a.begin(); it != a.end(); ++it) keys.insert(it.key());
        for (auto it = b.begin(); it != b.end(); ++it) keys.insert(it.key());
        for (const auto& key : keys) {
            const std::string child = path + "/" + pointer_token(key);
            if (!a.contains(key) || !b.contains(key)) {
                out.insert({child, "missing_field"});  // one of two present: a tie counts as missing
            } else {
                brute_diff(a[key], b[key], child, out);
            }
        }
        return;
    }
    if (a.is_array()) {
        const std::size_t n = std::max(a.size(), b.size());
        for (std::size_t i = 0; i < n; ++i) {
            const std::string child = path + "/" + std::to_string(i);
            if (i >= a.size() || i >= b.size()) {
                out.insert({child, "missing_field"});
            } else {
                brute_diff(a[i], b[i], child, out);
            }
        }
        return;
    }
    if (a.dump() != b.dump()) out.insert({here, "value_mismatch"});
}

inline DiffSet brute_diff(const nlohmann::json& a, const nlohmann::json& b) {
    DiffSet out;
    brute_diff(a, b, "", out);
    return out;
}

}  // namespace refcheck
