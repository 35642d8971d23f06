// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specdiff/endpoint.hpp"
#include "specdiff/spec.hpp"

namespace specdiff::mock {

struct ChainConfig {
    std::uint64_t seed = 7;
    std::uint64_t tip = 64;  // blocks 0..tip
    std::uint32_t accounts = 128;
    std::uint32_t transactions = 256;
    std::uint64_t current_slot = 64;
    std::uint64_t finalized_epochs = 5;
    std::uint32_t validators = 64;
    std::uint32_t peers = 4;
};

struct Transaction {
    std::string hash;
    std::uint64_t block_number = 0;
    std::uint64_t index = 0;
    std::string from;
    std::string to;
    std::uint64_t value = 0;
    std::uint64_t nonce = 0;
    std::uint64_t gas_used = 21000;
};

struct Block {
    std::uint64_t number = 0;
    std::string hash;
    std::string parent_hash;
    std::string miner;
    std::string state_root;
    std::uint64_t timestamp = 0;
    std::vector<std::size_t> transactions;  // indices into SyntheticChain::transactions
};

struct BeaconSlot {
    std::uint64_t slot = 0;
    std::string root;
    std::string parent_root;
    std::string state_root;
    std::string body_root;
    std::uint64_t proposer_index = 0;
};

struct Validator {
    std::uint64_t index = 0;
    std::string pubkey;
};

// Immutable chain snapshot shared by every node of a fleet.
class SyntheticChain {
  public:
    explicit SyntheticChain(const ChainConfig& config = {});

    const ChainConfig& config() const { return config_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<Transaction>& transactions() const { return transactions_; }
    const std::vector<std::string>& accounts() const { return accounts_; }
    const std::vector<BeaconSlot>& slots() const { return slots_; }
    const std::vector<Validator>& validators() const { return validators_; }
    const std::vector<std::string>& peer_ids() const { return peer_ids_; }

    const Block* block_by_hash(const std::string& hash) const;
    const Transaction* transaction_by_hash(const std::string& hash) const;
    const BeaconSlot* slot_by_root(const std::string& root) const;

    // Balance and nonce as of the end of block `number`.
    std::uint64_t balance(const std::string& address, std::uint64_t number) const;
    std::uint64_t nonce(const std::string& address, std::uint64_t number) const;

    std::uint64_t finalized_block() const { return config_.tip / 2; }
    std::uint64_t safe_block() const { return config_.tip - config_.tip / 4; }
    std::uint64_t current_epoch() const { return config_.current_slot / 32; }
    std::uint64_t finalized_checkpoint_epoch() const;

  private:
    ChainConfig config_;
    std::vector<Block> blocks_;
    std::vector<Transaction> transactions_;
    std::vector<std::string> accounts_;
    std::map<std::string, std::uint64_t> initial_balances_;
    std::map<std::string, std::size_t> block_index_;
    std::map<std::string, std::size_t> transaction_index_;
    std::vector<BeaconSlot> slots_;
    std::map<std::string, std::size_t> slot_index_;
    std::vector<Validator> validators_;
    std::vector<std::string> peer_ids_;
};

struct Reply {
    int status = 200;
    json body;
};

struct HttpCall {
    std::string verb;  // "GET" | "POST"
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

// The API the mock servers actually implement (bundled EL + CL specs).
const ApiSpec& served_api();

// Deterministic answer of a bug-free node. Malformed requests get the
// ecosystem's error shape: JSON-RPC error objects for EL, {code, message}
// with an HTTP status for CL.
Reply canonical_response(const HttpCall& call, const SyntheticChain& chain);

enum class Action { kDropField, kExtraField, kReformat, kWrongValue, kWrongStatus, kErrorMessage, kStall, kCrashMessage };

std::string_view to_string(Action action);

struct Injection {
    std::optional<int> node_id;
    std::optional<std::string> node_label;
    std::string method;
    Action action = Action::kDropField;
    std::string path;            // JSON pointer into the response body
    json value;                  // extra_field / wrong_value / rephrase text
    std::string transform;       // reformat: pad_hex | upper_hex | to_decimal | rephrase
    int status = 500;            // wrong_status
    std::string text;            // error_message / crash_message
    std::uint32_t stall_ms = 0;  // stall
    // Optional predicate: {"pointer": "/params/0", "equals": v} or
    // {"pointer": ..., "exists": bool}, evaluated against the request view.
    json trigger;
    std::string label;  // "genuine" | "benign"; used only for metrics

    bool targets(int node, const std::string& node_label_value) const;
};

Injection injection_from_json(const json& document);
json injection_to_json(const Injection& injection);

struct Scenario {
    ChainConfig chain;
    std::uint32_t node_count = 3;
    std::vector<Injection> injections;
    // Per-node control overrides, keyed by node id.
    std::map<int, json> node_overrides;
};

Scenario scenario_from_json(const json& document);
json scenario_to_json(const Scenario& scenario);

// Method name addressed by an HTTP call, or empty if unknown.
std::string method_of(const HttpCall& call);

// Applies one node's injections to a canonical reply. Stalls are returned,
// not slept, so callers control interruption.
struct Injected {
    Reply reply;
    std::uint32_t stall_ms = 0;
};
Injected apply_injections(const std::vector<const Injection*>& injections, const HttpCall& call, Reply reply);

// A running fleet; every node serves EL JSON-RPC on POST "/" and the CL
// REST routes on the same port. Stops on destruction.
class Fleet {
  public:
    explicit Fleet(const Scenario& scenario);
    ~Fleet();
    Fleet(const Fleet&) = delete;
    Fleet& operator=(const Fleet&) = delete;

    // EL endpoints get ids 0..n-1, CL endpoints n..2n-1; both layers of a
    // node share one URL.
    std::vector<Endpoint> endpoints(std::uint32_t timeout_ms = kDefaultTimeoutMs) const;
    std::vector<Endpoint> endpoints(Layer layer, std::uint32_t timeout_ms = kDefaultTimeoutMs) const;
    const SyntheticChain& chain() const;
    const Scenario& scenario() const;
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Convenience: spawn a fleet with no injections.
std::unique_ptr<Fleet> spawn_fleet(std::uint64_t chain_seed, std::uint32_t node_count,
                                   const std::vector<Injection>& injections = {});

}  // namespace specdiff::mock
