// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "specdiff/policy.hpp"
#include "specdiff/schema.hpp"

namespace specdiff {

struct OracleQuery {
    std::string method;
    std::string field_path;
    json schema;                     // schema of the divergent field (or of the whole response)
    std::map<int, json> responses;  // endpoint_id -> observed value
};

struct OracleAnswer {
    bool semantically_equivalent = false;
    std::string reason;
};

// Decides residual equivalence questions. Throws Error(kOracleFailure) when
// no well-formed answer can be obtained.
class EquivalenceOracle {
  public:
    virtual ~EquivalenceOracle() = default;
    virtual OracleAnswer query(const OracleQuery& query) = 0;
};

// Always answers "not equivalent".
class StubFalseOracle : public EquivalenceOracle {
  public:
    OracleAnswer query(const OracleQuery& query) override;
};

// Equivalent iff every distinct observed value belongs to one group.
class StubLookupOracle : public EquivalenceOracle {
  public:
    explicit StubLookupOracle(std::vector<std::vector<json>> groups) : groups_(std::move(groups)) {}
    // {"groups": [[v, v, ...], ...]} or {"pairs": [[a, b], ...]}
    static StubLookupOracle from_json(const json& document);
    OracleAnswer query(const OracleQuery& query) override;

  private:
    std::vector<std::vector<json>> groups_;
};

// Models an unreachable backend; every query fails.
class UnavailableOracle : public EquivalenceOracle {
  public:
    OracleAnswer query(const OracleQuery& query) override;
};

struct ChatConfig {
    std::string base_url = "http://127.0.0.1:8000/v1";
    std::string model = "gpt-4o";
    double temperature = 0.0;
    std::string api_key_env = "ORACLE_API_KEY";
    std::uint32_t timeout_ms = 60'000;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

// One OpenAI-compatible chat-completions call; returns the reply text or
// nullopt on any transport or shape failure. The API key is read from the
// environment and never logged.
std::optional<std::string> chat_complete(const ChatConfig& config, const std::vector<ChatMessage>& messages);

// Fills the bundled equivalence prompt template.
std::vector<ChatMessage> equivalence_prompt(const OracleQuery& query);

// Strict parse of {"semantically_equivalent": bool, "reason": string}; no
// other keys, no surrounding text. Throws kOracleFailure.
OracleAnswer parse_oracle_answer(const std::string& text);

class ChatOracle : public EquivalenceOracle {
  public:
    explicit ChatOracle(ChatConfig config) : config_(std::move(config)) {}
    OracleAnswer query(const OracleQuery& query) override;  // one retry on malformed output

  private:
    ChatConfig config_;
};

// Equivalent only when every backend agrees it is.
class ConsensusOracle : public EquivalenceOracle {
  public:
    explicit ConsensusOracle(std::vector<std::unique_ptr<EquivalenceOracle>> backends);
    OracleAnswer query(const OracleQuery& query) override;

  private:
    std::vector<std::unique_ptr<EquivalenceOracle>> backends_;
};

// Modes: "stub_false", "stub_lookup:<file>", "unavailable", "external",
// "consensus:<mode>+<mode>". Throws kConfig for unknown modes.
std::unique_ptr<EquivalenceOracle> make_oracle(const std::string& mode, const ChatConfig& chat = {});

// Consistency-policy classifier backed by a chat model.
class ChatPolicyClassifier : public PolicyClassifier {
  public:
    explicit ChatPolicyClassifier(ChatConfig config) : config_(std::move(config)) {}
    PolicyDecision classify(const FieldContext& field) override;

  private:
    ChatConfig config_;
};

}  // namespace specdiff
