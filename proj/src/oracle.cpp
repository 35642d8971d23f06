// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "specdiff/embedded_data.hpp"
#include "specdiff/error.hpp"
#include "specdiff/http.hpp"

namespace specdiff {

namespace {

    std::string replace_all(std::string text, const std::string& token, const std::string& value) {
        for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size())) {
            text.replace(pos, token.size(), value);
        }
        return text;
    }

    // Templates hold a "[system]" and a "[user]" section.
    std::vector<ChatMessage> split_template(const std::string& text) {
        const auto system = text.find("[system]");
        const auto user = text.find("[user]");
        if (system == std::string::npos || user == std::string::npos || user < system) {
            throw Error(ErrorCode::kConfig, "prompt template needs [system] and [user] sections");
        }
        auto trim = [](std::string s) {
            const auto first = s.find_first_not_of(" \n");
            const auto last = s.find_last_not_of(" \n");
            return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
        };
        return {{"system", trim(text.substr(system + 8, user - system - 8))}, {"user", trim(text.substr(user + 6))}};
    }

    std::string read_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    // Tolerates a fenced code block around the object, nothing else.
    std::string strip_fence(const std::string& text) {
        auto first = text.find_first_not_of(" \n\r\t");
        auto last = text.find_last_not_of(" \n\r\t");
        if (first == std::string::npos) return {};
        std::string body = text.substr(first, last - first + 1);
        if (body.starts_with("```") && body.ends_with("```") && body.size() >= 6) {
            body = body.substr(3, body.size() - 6);
            if (body.starts_with("json")) body = body.substr(4);
        }
        return body;
    }

}  // namespace

OracleAnswer StubFalseOracle::query(const OracleQuery&) { return {false, "stub"}; }

StubLookupOracle StubLookupOracle::from_json(const json& document) {
    if (!document.is_object()) throw Error(ErrorCode::kConfig, "lookup table must be a JSON object");
    std::vector<std::vector<json>> groups;
    for (const char* key : {"groups", "pairs"}) {
        for (const auto& group : document.value(key, json::array())) {
            if (!group.is_array() || group.size() < 2) {
                throw Error(ErrorCode::kConfig, std::string("lookup ") + key + " entries must be arrays of >= 2 values");
            }
            groups.emplace_back(group.begin(), group.end());
        }
    }
    return StubLookupOracle(std::move(groups));
}

OracleAnswer StubLookupOracle::query(const OracleQuery& query) {
    std::vector<json> distinct;
    for (const auto& [_, value] : query.responses) {
        if (std::find(distinct.begin(), distinct.end(), value) == distinct.end()) distinct.push_back(value);
    }
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        const auto& group = groups_[i];
        const bool covered = std::all_of(distinct.begin(), distinct.end(), [&](const json& value) {
            return std::find(group.begin(), group.end(), value) != group.end();
        });
        if (covered) return {true, "lookup: group " + std::to_string(i)};
    }
    return {false, "lookup: no group covers the observed values"};
}

OracleAnswer UnavailableOracle::query(const OracleQuery&) {
    throw Error(ErrorCode::kOracleFailure, "oracle backend unavailable");
}

std::optional<std::string> chat_complete(const ChatConfig& config, const std::vector<ChatMessage>& messages) {
    json payload = {{"model", config.model}, {"temperature", config.temperature}, {"messages", json::array()}};
    for (const auto& message : messages) payload["messages"].push_back({{"role", message.role}, {"content", message.content}});
    std::vector<http::Header> headers;
    if (const char* key = std::getenv(config.api_key_env.c_str()); key != nullptr && *key != '\0') {
        headers.push_back({"Authorization", std::string("Bearer ") + key});
    }
    std::string base = config.base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    auto result = http::send(base, "POST", "/chat/completions", payload.dump(), config.timeout_ms, headers);
    if (!result.response || result.response->status != 200) return std::nullopt;
    auto parsed = json::parse(result.response->body, nullptr, false);
    const json::json_pointer content("/choices/0/message/content");
    if (parsed.is_discarded() || !parsed.contains(content) || !parsed.at(content).is_string()) return std::nullopt;
    return parsed.at(content).get<std::string>();
}

std::vector<ChatMessage> equivalence_prompt(const OracleQuery& query) {
    auto messages = split_template(embedded::kEquivalencePrompt);
    json responses = json::array();
    for (const auto& [id, value] : query.responses) responses.push_back({{"client", id}, {"response", value}});
    messages[1].content = replace_all(messages[1].content, "{{schema}}", query.schema.dump(2));
    messages[1].content = replace_all(messages[1].content, "{{responses}}", responses.dump(2));
    return messages;
}

OracleAnswer parse_oracle_answer(const std::string& text) {
    auto parsed = json::parse(strip_fence(text), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || parsed.size() != 2) {
        throw Error(ErrorCode::kOracleFailure, "oracle output is not the two-field JSON object");
    }
    auto equivalent = parsed.find("semantically_equivalent");
    auto reason = parsed.find("reason");
    if (equivalent == parsed.end() || !equivalent->is_boolean() || reason == parsed.end() || !reason->is_string()) {
        throw Error(ErrorCode::kOracleFailure, "oracle output fields have the wrong names or types");
    }
    return {equivalent->get<bool>(), reason->get<std::string>()};
}

OracleAnswer ChatOracle::query(const OracleQuery& query) {
    const auto messages = equivalence_prompt(query);
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto reply = chat_complete(config_, messages);
        if (!reply) throw Error(ErrorCode::kOracleFailure, "oracle backend unreachable");
        try {
            return parse_oracle_answer(*reply);
        } catch (const Error&) {
            if (attempt == 1) throw;
        }
    }
    throw Error(ErrorCode::kOracleFailure, "oracle output malformed");
}

ConsensusOracle::ConsensusOracle(std::vector<std::unique_ptr<EquivalenceOracle>> backends)
    : backends_(std::move(backends)) {
    if (backends_.empty()) throw Error(ErrorCode::kConfig, "consensus oracle needs at least one backend");
}

OracleAnswer ConsensusOracle::query(const OracleQuery& query) {
    std::string reasons;
    for (std::size_t i = 0; i < backends_.size(); ++i) {
        auto answer = backends_[i]->query(query);
        reasons += (i == 0 ? "" : "; ") + answer.reason;
        if (!answer.semantically_equivalent) return {false, "no consensus: " + reasons};
    }
    return {true, "consensus: " + reasons};
}

std::unique_ptr<EquivalenceOracle> make_oracle(const std::string& mode, const ChatConfig& chat) {
    if (mode == "stub_false") return std::make_unique<StubFalseOracle>();
    if (mode == "unavailable") return std::make_unique<UnavailableOracle>();
    if (mode == "external") return std::make_unique<ChatOracle>(chat);
    if (mode.starts_with("stub_lookup:")) {
        const auto path = mode.substr(12);
        auto parsed = json::parse(read_file(path), nullptr, false);
        if (parsed.is_discarded()) throw Error(ErrorCode::kConfig, "lookup table " + path + " is not valid JSON");
        return std::make_unique<StubLookupOracle>(StubLookupOracle::from_json(parsed));
    }
    if (mode.starts_with("consensus:")) {
        std::vector<std::unique_ptr<EquivalenceOracle>> backends;
        std::stringstream list(mode.substr(10));
        std::string item;
        while (std::getline(list, item, '+')) backends.push_back(make_oracle(item, chat));
        return std::make_unique<ConsensusOracle>(std::move(backends));
    }
    throw Error(ErrorCode::kConfig, "unknown oracle mode " + mode);
}

PolicyDecision ChatPolicyClassifier::classify(const FieldContext& field) {
    auto messages = split_template(embedded::kPolicyPrompt);
    auto& user = messages[1].content;
    user = replace_all(user, "{{method}}", field.method);
    user = replace_all(user, "{{summary}}", field.summary.value_or(""));
    user = replace_all(user, "{{path}}", field.path.empty() ? "/" : field.path);
    user = replace_all(user, "{{field}}", field.field_name);
    user = replace_all(user, "{{schema}}", field.node != nullptr ? schema_to_json(*field.node).dump(2) : "{}");
    const std::string where = field.method + " " + (field.path.empty() ? "/" : field.path);
    auto reply = chat_complete(config_, messages);
    if (!reply) throw Error(ErrorCode::kClassifierFailure, "policy classifier unreachable for " + where);
    auto parsed = json::parse(strip_fence(*reply), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("policy") || !parsed["policy"].is_string()) {
        throw Error(ErrorCode::kClassifierFailure, "malformed policy answer for " + where);
    }
    auto policy = policy_from_string(parsed["policy"].get<std::string>());
    if (!policy) throw Error(ErrorCode::kClassifierFailure, "unknown policy in answer for " + where);
    return {policy, parsed.value("environmental", false)};
}

}  // namespace specdiff
