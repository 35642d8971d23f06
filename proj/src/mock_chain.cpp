// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>

#include "specdiff/embedded_data.hpp"
#include "specdiff/error.hpp"
#include "specdiff/mock.hpp"
#include "specdiff/rng.hpp"

namespace specdiff::mock {

namespace {

    constexpr std::uint64_t kGasPerTx = 21000;
    constexpr std::uint64_t kGenesisTime = 1'700'000'000;

    std::string hex_bytes(std::uint64_t seed, std::string_view domain, std::uint64_t index, std::size_t bytes) {
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out = "0x";
        std::uint64_t state = seed ^ fnv1a(domain) ^ splitmix64(index);
        while (out.size() < 2 + 2 * bytes) {
            state = splitmix64(state);
            for (int shift = 60; shift >= 0 && out.size() < 2 + 2 * bytes; shift -= 4) {
                out.push_back(kDigits[(state >> shift) & 0xF]);
            }
        }
        return out;
    }

    std::string quantity(std::uint64_t value) {
        static constexpr char kDigits[] = "0123456789abcdef";
        if (value == 0) return "0x0";
        std::string digits;
        for (; value > 0; value >>= 4) digits.push_back(kDigits[value & 0xF]);
        std::reverse(digits.begin(), digits.end());
        return "0x" + digits;
    }

    std::optional<std::uint64_t> parse_number(std::string_view text, int base) {
        if (text.empty()) return std::nullopt;
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
        if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
        return value;
    }

    std::string base64url_text(std::uint64_t seed, std::string_view domain, std::size_t length) {
        static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
        std::string out;
        std::uint64_t state = seed ^ fnv1a(domain);
        while (out.size() < length) {
            state = splitmix64(state);
            out.push_back(kAlphabet[state % 64]);
        }
        return out;
    }

}  // namespace

SyntheticChain::SyntheticChain(const ChainConfig& config) : config_(config) {
    if (config_.accounts < 2) throw Error(ErrorCode::kConfig, "synthetic chain needs at least 2 accounts");
    Rng rng(splitmix64(config_.seed));
    for (std::uint32_t i = 0; i < config_.accounts; ++i) {
        accounts_.push_back(hex_bytes(config_.seed, "account", i, 20));
        initial_balances_[accounts_.back()] = rng.uniform(1'000'000'000'000'000ULL, 100'000'000'000'000'000ULL);
    }

    std::map<std::string, std::uint64_t> next_nonce;
    for (std::uint64_t number = 0; number <= config_.tip; ++number) {
        Block block;
        block.number = number;
        block.hash = hex_bytes(config_.seed, "block", number, 32);
        block.parent_hash = number == 0 ? "0x" + std::string(64, '0') : blocks_.back().hash;
        block.miner = accounts_[number % accounts_.size()];
        block.state_root = hex_bytes(config_.seed, "state", number, 32);
        block.timestamp = kGenesisTime + 12 * number;
        blocks_.push_back(std::move(block));
    }
    // Transactions are spread evenly over blocks 1..tip; genesis stays empty.
    for (std::uint32_t i = 0; i < config_.transactions && config_.tip > 0; ++i) {
        Transaction tx;
        tx.block_number = 1 + (i * config_.tip) / config_.transactions;
        tx.index = blocks_[tx.block_number].transactions.size();
        tx.hash = hex_bytes(config_.seed, "tx", i, 32);
        tx.from = accounts_[rng.index(accounts_.size())];
        do {
            tx.to = accounts_[rng.index(accounts_.size())];
        } while (tx.to == tx.from);
        tx.value = rng.uniform(1, 1'000'000'000'000ULL);
        tx.nonce = next_nonce[tx.from]++;
        blocks_[tx.block_number].transactions.push_back(transactions_.size());
        transaction_index_[tx.hash] = transactions_.size();
        transactions_.push_back(std::move(tx));
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) block_index_[blocks_[i].hash] = i;

    for (std::uint32_t i = 0; i < config_.validators; ++i) {
        validators_.push_back({i, hex_bytes(config_.seed, "validator", i, 48)});
    }
    for (std::uint64_t slot = 0; slot <= config_.current_slot; ++slot) {
        BeaconSlot s;
        s.slot = slot;
        s.root = hex_bytes(config_.seed, "beacon-block", slot, 32);
        s.parent_root = slot == 0 ? "0x" + std::string(64, '0') : slots_.back().root;
        s.state_root = hex_bytes(config_.seed, "beacon-state", slot, 32);
        s.body_root = hex_bytes(config_.seed, "beacon-body", slot, 32);
        s.proposer_index = config_.validators == 0 ? 0 : slot % config_.validators;
        slot_index_[s.root] = slots_.size();
        slot_index_[s.state_root] = slots_.size();
        slots_.push_back(std::move(s));
    }
    for (std::uint32_t i = 0; i < config_.peers; ++i) {
        peer_ids_.push_back("16Uiu2HAm" + base64url_text(config_.seed + i, "peer", 44));
    }
}

const Block* SyntheticChain::block_by_hash(const std::string& hash) const {
    auto it = block_index_.find(hash);
    return it == block_index_.end() ? nullptr : &blocks_[it->second];
}

const Transaction* SyntheticChain::transaction_by_hash(const std::string& hash) const {
    auto it = transaction_index_.find(hash);
    return it == transaction_index_.end() ? nullptr : &transactions_[it->second];
}

const BeaconSlot* SyntheticChain::slot_by_root(const std::string& root) const {
    auto it = slot_index_.find(root);
    return it == slot_index_.end() ? nullptr : &slots_[it->second];
}

std::uint64_t SyntheticChain::balance(const std::string& address, std::uint64_t number) const {
    auto it = initial_balances_.find(address);
    std::uint64_t balance = it == initial_balances_.end() ? 0 : it->second;
    for (const auto& tx : transactions_) {
        if (tx.block_number > number) break;
        if (tx.to == address) balance += tx.value;
        if (tx.from == address) balance -= tx.value;
    }
    return balance;
}

std::uint64_t SyntheticChain::nonce(const std::string& address, std::uint64_t number) const {
    std::uint64_t count = 0;
    for (const auto& tx : transactions_) {
        if (tx.block_number > number) break;
        if (tx.from == address) ++count;
    }
    return count;
}

std::uint64_t SyntheticChain::finalized_checkpoint_epoch() const {
    return current_epoch() == 0 ? 0 : current_epoch() - 1;
}

const ApiSpec& served_api() {
    static const ApiSpec api = merge_specs({parse_spec(embedded::kExecutionSpec, "execution"),
                                            parse_spec(embedded::kBeaconSpec, "beacon")});
    return api;
}

namespace {

    // First reason `value` violates `schema`, phrased like a client would.
    std::optional<std::string> explain(const SchemaNode& schema, const json& value, const std::string& where) {
        if (!schema.any_of.empty()) {
            for (const auto& branch : schema.any_of) {
                if (!explain(*branch, value, where)) return std::nullopt;
            }
            return "invalid " + where + ": no matching alternative";
        }
        if (!json_matches_kind(schema.kind, value)) {
            return "invalid " + where + ": expected " + std::string(to_string(schema.kind));
        }
        if (schema.enum_values &&
            std::find(schema.enum_values->begin(), schema.enum_values->end(), value) == schema.enum_values->end()) {
            return "invalid " + where + ": value not allowed";
        }
        if (schema.kind == SchemaKind::kString && schema.compiled_pattern &&
            !std::regex_search(value.get_ref<const std::string&>(), *schema.compiled_pattern)) {
            return "invalid " + where + ": malformed string";
        }
        if (schema.kind == SchemaKind::kArray) {
            const auto size = value.size();
            if (schema.min_items && schema.max_items && *schema.min_items == *schema.max_items &&
                size != *schema.min_items) {
                return "expected " + std::to_string(*schema.min_items) + " and " + std::to_string(size) + " found";
            }
            if ((schema.min_items && size < *schema.min_items) || (schema.max_items && size > *schema.max_items)) {
                return "invalid " + where + ": wrong number of items";
            }
            if (schema.items) {
                for (std::size_t i = 0; i < size; ++i) {
                    if (auto reason = explain(*schema.items, value[i], where + "[" + std::to_string(i) + "]")) return reason;
                }
            }
        }
        if (schema.kind == SchemaKind::kObject) {
            for (const auto& name : schema.required) {
                if (!value.contains(name)) return "missing field " + where + "." + name;
            }
            for (const auto& [key, element] : value.items()) {
                const SchemaNode* child = schema.property(key);
                if (child == nullptr) {
                    if (!schema.additional_properties_allowed) return "unknown field " + where + "." + key;
                    continue;
                }
                if (auto reason = explain(*child, element, where + "." + key)) return reason;
            }
        }
        return std::nullopt;
    }

    // ---- execution layer ----

    json rpc_error(const json& id, int code, const std::string& message) {
        return {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
    }

    json rpc_result(const json& id, json result) {
        return {{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
    }

    struct NotFound {
        std::string message;
    };

    // Resolves a block number, tag or hash; nullopt for unknown entities.
    std::optional<std::uint64_t> resolve_block(const json& selector, const SyntheticChain& chain) {
        const auto& text = selector.get_ref<const std::string&>();
        const auto tip = chain.config().tip;
        if (text == "earliest") return 0;
        if (text == "latest" || text == "pending") return tip;
        if (text == "safe") return chain.safe_block();
        if (text == "finalized") return chain.finalized_block();
        if (text.size() == 66) {
            const Block* block = chain.block_by_hash(text);
            if (block == nullptr) return std::nullopt;
            return block->number;
        }
        auto number = parse_number(std::string_view(text).substr(2), 16);
        if (!number || *number > tip) return std::nullopt;
        return number;
    }

    json tx_json(const Transaction& tx, const SyntheticChain& chain) {
        return {{"hash", tx.hash},
                {"blockHash", chain.blocks()[tx.block_number].hash},
                {"blockNumber", quantity(tx.block_number)},
                {"transactionIndex", quantity(tx.index)},
                {"from", tx.from},
                {"to", tx.to},
                {"value", quantity(tx.value)},
                {"nonce", quantity(tx.nonce)},
                {"gas", quantity(kGasPerTx)},
                {"input", "0x"}};
    }

    json receipt_json(const Transaction& tx, const SyntheticChain& chain) {
        return {{"transactionHash", tx.hash},
                {"blockHash", chain.blocks()[tx.block_number].hash},
                {"blockNumber", quantity(tx.block_number)},
                {"transactionIndex", quantity(tx.index)},
                {"from", tx.from},
                {"to", tx.to},
                {"status", "0x1"},
                {"gasUsed", quantity(tx.gas_used)},
                {"cumulativeGasUsed", quantity(tx.gas_used * (tx.index + 1))},
                {"logs", json::array()}};
    }

    json block_json(const Block& block, bool hydrated, const SyntheticChain& chain) {
        json transactions = json::array();
        for (auto index : block.transactions) {
            const auto& tx = chain.transactions()[index];
            transactions.push_back(hydrated ? tx_json(tx, chain) : json(tx.hash));
        }
        return {{"number", quantity(block.number)},
                {"hash", block.hash},
                {"parentHash", block.parent_hash},
                {"miner", block.miner},
                {"stateRoot", block.state_root},
                {"timestamp", quantity(block.timestamp)},
                {"gasLimit", quantity(30'000'000)},
                {"gasUsed", quantity(kGasPerTx * block.transactions.size())},
                {"transactions", std::move(transactions)}};
    }

    // Filter ids carry a checksum byte so every node recognizes the same ids
    // without shared state.
    std::string filter_id(const json& filter) {
        const auto body = static_cast<std::uint32_t>(fnv1a(filter.dump()) & 0xFFFFFF) | 0x100000;
        const auto check = static_cast<std::uint32_t>(splitmix64(body) & 0xFF);
        return quantity((static_cast<std::uint64_t>(body) << 8) | check);
    }

    bool known_filter(const std::string& id) {
        auto value = parse_number(std::string_view(id).substr(2), 16);
        if (!value || *value > 0xFFFFFFFFULL) return false;
        const auto body = *value >> 8;
        return body >= 0x100000 && (splitmix64(body) & 0xFF) == (*value & 0xFF);
    }

    json el_method(const std::string& method, const json& params, const SyntheticChain& chain) {
        const auto tip = chain.config().tip;
        auto block_or_throw = [&](const json& selector) {
            auto number = resolve_block(selector, chain);
            if (!number) throw NotFound{"header not found"};
            return *number;
        };
        auto lower = [](std::string text) {
            std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
            return text;
        };
        if (method == "eth_blockNumber") return quantity(tip);
        if (method == "eth_chainId") return quantity(1337);
        if (method == "web3_clientVersion") return "specdiff-mock/v0.1.0/linux-amd64";
        if (method == "eth_syncing") return false;
        if (method == "eth_getBalance") return quantity(chain.balance(lower(params[0]), block_or_throw(params[1])));
        if (method == "eth_getTransactionCount") return quantity(chain.nonce(lower(params[0]), block_or_throw(params[1])));
        if (method == "eth_getBlockByNumber" || method == "eth_getBlockByHash") {
            auto number = resolve_block(params[0], chain);
            if (!number) return nullptr;
            return block_json(chain.blocks()[*number], params[1].get<bool>(), chain);
        }
        if (method == "eth_getBlockReceipts") {
            auto number = resolve_block(params[0], chain);
            if (!number) return nullptr;
            json receipts = json::array();
            for (auto index : chain.blocks()[*number].transactions) {
                receipts.push_back(receipt_json(chain.transactions()[index], chain));
            }
            return receipts;
        }
        if (method == "eth_getBlockTransactionCountByNumber" || method == "eth_getBlockTransactionCountByHash") {
            auto number = resolve_block(params[0], chain);
            if (!number) return nullptr;
            return quantity(chain.blocks()[*number].transactions.size());
        }
        if (method == "eth_getTransactionByHash" || method == "eth_getTransactionReceipt") {
            const Transaction* tx = chain.transaction_by_hash(params[0]);
            if (tx == nullptr) return nullptr;
            return method == "eth_getTransactionByHash" ? tx_json(*tx, chain) : receipt_json(*tx, chain);
        }
        if (method == "eth_getTransactionByBlockHashAndIndex") {
            const Block* block = chain.block_by_hash(params[0]);
            if (block == nullptr) return nullptr;
            auto index = parse_number(params[1].get<std::string>().substr(2), 16);
            if (!index || *index >= block->transactions.size()) return nullptr;
            return tx_json(chain.transactions()[block->transactions[*index]], chain);
        }
        if (method == "eth_newFilter") return filter_id(params[0]);
        if (method == "eth_getFilterChanges") {
            if (!known_filter(params[0])) throw NotFound{"filter not found"};
            json hashes = json::array();
            for (auto index : chain.blocks()[tip].transactions) hashes.push_back(chain.transactions()[index].hash);
            return hashes;
        }
        throw NotFound{"the method " + method + " does not exist/is not available"};
    }

    Reply execution_reply(const std::string& body, const SyntheticChain& chain) {
        auto request = json::parse(body, nullptr, false);
        if (request.is_discarded()) return {200, rpc_error(nullptr, -32700, "parse error")};
        if (!request.is_object() || !request.contains("method") || !request["method"].is_string()) {
            return {200, rpc_error(request.is_object() ? request.value("id", json()) : json(), -32600, "invalid request")};
        }
        const json id = request.value("id", json());
        const std::string method_name = request["method"];
        const MethodSpec* method = served_api().method(method_name);
        if (method == nullptr || method->transport != Transport::kJsonRpcPost) {
            return {200, rpc_error(id, -32601, "the method " + method_name + " does not exist/is not available")};
        }
        json params = request.value("params", json::array());
        if (params.is_null()) params = json::array();
        if (!params.is_array()) return {200, rpc_error(id, -32602, "non-array args")};
        if (params.size() > method->params.size()) {
            return {200, rpc_error(id, -32602,
                                   "too many arguments, want at most " + std::to_string(method->params.size()))};
        }
        for (std::size_t i = 0; i < method->params.size(); ++i) {
            const auto& param = method->params[i];
            if (i >= params.size() || params[i].is_null()) {
                if (param.required) {
                    return {200, rpc_error(id, -32602, "missing value for required argument " + std::to_string(i))};
                }
                continue;
            }
            if (auto reason = explain(*param.schema, params[i], "argument " + std::to_string(i))) {
                return {200, rpc_error(id, -32602, *reason)};
            }
        }
        try {
            return {200, rpc_result(id, el_method(method_name, params, chain))};
        } catch (const NotFound& e) {
            return {200, rpc_error(id, -32000, e.message)};
        }
    }

    // ---- consensus layer ----

    struct HttpError {
        int status;
        std::string message;
    };

    Reply cl_error(int status, const std::string& message) { return {status, {{"code", status}, {"message", message}}}; }

    std::vector<std::string> split_path(const std::string& path) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= path.size()) {
            auto next = path.find('/', pos);
            if (next == std::string::npos) next = path.size();
            if (next > pos) parts.push_back(path.substr(pos, next - pos));
            pos = next + 1;
        }
        return parts;
    }

    std::string percent_decode(const std::string& text) {
        std::string out;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '%' && i + 2 < text.size()) {
                if (auto byte = parse_number(std::string_view(text).substr(i + 1, 2), 16)) {
                    out.push_back(static_cast<char>(*byte));
                    i += 2;
                    continue;
                }
            }
            out.push_back(text[i]);
        }
        return out;
    }

    // Matches a request path against a template; fills placeholder values.
    bool match_route(const std::string& path_template, const std::string& path,
                     std::map<std::string, std::string>& values) {
        const auto pattern = split_path(path_template);
        const auto parts = split_path(path);
        if (pattern.size() != parts.size()) return false;
        std::map<std::string, std::string> found;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (pattern[i].starts_with("{") && pattern[i].ends_with("}")) {
                found[pattern[i].substr(1, pattern[i].size() - 2)] = percent_decode(parts[i]);
            } else if (pattern[i] != parts[i]) {
                return false;
            }
        }
        values = std::move(found);
        return true;
    }

    const BeaconSlot& resolve_slot(const std::string& id, bool state, const SyntheticChain& chain) {
        const auto current = chain.config().current_slot;
        std::optional<std::uint64_t> slot;
        if (id == "head") {
            slot = current;
        } else if (id == "genesis") {
            slot = 0;
        } else if (id == "finalized") {
            slot = chain.finalized_checkpoint_epoch() * 32;
        } else if (id == "justified") {
            slot = std::min(current, (chain.finalized_checkpoint_epoch() + 1) * 32);
        } else if (id.starts_with("0x")) {
            const BeaconSlot* found = chain.slot_by_root(id);
            if (found == nullptr || (state ? found->state_root : found->root) != id) {
                throw HttpError{404, state ? "State not found" : "Block not found"};
            }
            return *found;
        } else {
            slot = parse_number(id, 10);
        }
        if (!slot || *slot > current) throw HttpError{404, state ? "State not found" : "Block not found"};
        return chain.slots()[*slot];
    }

    json meta(const BeaconSlot& slot, const SyntheticChain& chain) {
        return {{"execution_optimistic", false}, {"finalized", slot.slot <= chain.finalized_checkpoint_epoch() * 32}};
    }

    json checkpoint(std::uint64_t epoch, const SyntheticChain& chain) {
        const auto slot = std::min(epoch * 32, chain.config().current_slot);
        return {{"epoch", std::to_string(epoch)}, {"root", chain.slots()[slot].root}};
    }

    std::string signature(std::uint64_t slot, const SyntheticChain& chain) {
        return hex_bytes(chain.config().seed, "signature", slot, 96);
    }

    std::string node_peer_id(const SyntheticChain& chain) {
        return "16Uiu2HAm" + base64url_text(chain.config().seed, "self", 44);
    }

    std::string node_enr(const SyntheticChain& chain, std::uint64_t salt) {
        return "enr:-" + base64url_text(chain.config().seed + salt, "enr", 120);
    }

    json cl_method(const std::string& method, const std::map<std::string, std::string>& path,
                   const std::map<std::string, std::string>& query, const json& body, const SyntheticChain& chain) {
        if (method == "getBlockHeader") {
            const auto& s = resolve_slot(path.at("block_id"), false, chain);
            json out = meta(s, chain);
            out["data"] = {{"root", s.root},
                           {"canonical", true},
                           {"header",
                            {{"message",
                              {{"slot", std::to_string(s.slot)},
                               {"proposer_index", std::to_string(s.proposer_index)},
                               {"parent_root", s.parent_root},
                               {"state_root", s.state_root},
                               {"body_root", s.body_root}}},
                             {"signature", signature(s.slot, chain)}}}};
            return out;
        }
        if (method == "getStateRoot") {
            const auto& s = resolve_slot(path.at("state_id"), true, chain);
            json out = meta(s, chain);
            out["data"] = {{"root", s.state_root}};
            return out;
        }
        if (method == "getStateFinalityCheckpoints") {
            const auto& s = resolve_slot(path.at("state_id"), true, chain);
            const auto epoch = s.slot / 32;
            const auto finalized = std::min(chain.finalized_checkpoint_epoch(), epoch);
            json out = meta(s, chain);
            out["data"] = {{"previous_justified", checkpoint(finalized, chain)},
                           {"current_justified", checkpoint(std::min(finalized + 1, epoch), chain)},
                           {"finalized", checkpoint(finalized, chain)}};
            return out;
        }
        if (method == "getEpochCommittees") {
            const auto& s = resolve_slot(path.at("state_id"), true, chain);
            std::uint64_t epoch = s.slot / 32;
            if (auto it = query.find("epoch"); it != query.end()) epoch = *parse_number(it->second, 10);
            if (epoch > chain.current_epoch() + 1) throw HttpError{400, "Epoch out of range"};
            const auto validators = chain.config().validators;
            const std::uint64_t per_slot = std::max<std::uint64_t>(1, validators / 32);
            json committees = json::array();
            for (std::uint64_t slot = epoch * 32; slot < epoch * 32 + 32; ++slot) {
                if (auto it = query.find("slot"); it != query.end() && *parse_number(it->second, 10) != slot) continue;
                for (std::uint64_t index = 0; index < std::min<std::uint64_t>(2, per_slot); ++index) {
                    if (auto it = query.find("index"); it != query.end() && *parse_number(it->second, 10) != index) {
                        continue;
                    }
                    json members = json::array();
                    const auto first = ((slot % 32) * per_slot + index) % std::max<std::uint32_t>(validators, 1);
                    members.push_back(std::to_string(first));
                    committees.push_back({{"index", std::to_string(index)},
                                          {"slot", std::to_string(slot)},
                                          {"validators", std::move(members)}});
                }
            }
            json out = meta(s, chain);
            out["data"] = std::move(committees);
            return out;
        }
        if (method == "postStateValidatorIdentities") {
            const auto& s = resolve_slot(path.at("state_id"), true, chain);
            json identities = json::array();
            for (const auto& v : chain.validators()) {
                bool wanted = body.empty();
                for (const auto& id : body) {
                    const auto& text = id.get_ref<const std::string&>();
                    wanted = wanted || text == v.pubkey || text == std::to_string(v.index);
                }
                if (!wanted) continue;
                identities.push_back(
                    {{"index", std::to_string(v.index)}, {"pubkey", v.pubkey}, {"activation_epoch", "0"}});
            }
            json out = meta(s, chain);
            out["data"] = std::move(identities);
            return out;
        }
        if (method == "getNodeIdentity") {
            return {{"data",
                     {{"peer_id", node_peer_id(chain)},
                      {"enr", node_enr(chain, 0)},
                      {"p2p_addresses", {"/ip4/10.0.0.1/tcp/9000/p2p/" + node_peer_id(chain)}},
                      {"discovery_addresses", {"/ip4/10.0.0.1/udp/9000/p2p/" + node_peer_id(chain)}},
                      {"metadata", {{"seq_number", "1"}, {"attnets", "0x0000000000000000"}, {"syncnets", "0x00"}}}}}};
        }
        if (method == "getPeers") {
            json peers = json::array();
            for (std::size_t i = 0; i < chain.peer_ids().size(); ++i) {
                peers.push_back({{"peer_id", chain.peer_ids()[i]},
                                 {"enr", node_enr(chain, i + 1)},
                                 {"last_seen_p2p_address", "/ip4/10.0.0." + std::to_string(i + 2) + "/tcp/9000"},
                                 {"state", "connected"},
                                 {"direction", i % 2 == 0 ? "outbound" : "inbound"}});
            }
            return {{"data", peers}, {"meta", {{"count", peers.size()}}}};
        }
        if (method == "getSyncingStatus") {
            return {{"data",
                     {{"head_slot", std::to_string(chain.config().current_slot)},
                      {"sync_distance", "0"},
                      {"is_syncing", false},
                      {"is_optimistic", false},
                      {"el_offline", false}}}};
        }
        if (method == "getNodeVersion") return {{"data", {{"version", "specdiff-mock/v0.1.0/linux-amd64"}}}};
        if (method == "publishBlockV2") return {{"code", 200}, {"message", "block accepted"}};
        throw HttpError{404, "route not found"};
    }

    Reply consensus_reply(const HttpCall& call, const SyntheticChain& chain) {
        const MethodSpec* method = nullptr;
        std::map<std::string, std::string> values;
        bool path_matched = false;
        for (const auto& [name, candidate] : served_api().methods) {
            if (!candidate.path_template || !match_route(*candidate.path_template, call.path, values)) continue;
            path_matched = true;
            const std::string verb = candidate.transport == Transport::kRestGet ? "GET" : "POST";
            if (verb == call.verb) {
                method = &candidate;
                break;
            }
        }
        if (method == nullptr) return path_matched ? cl_error(405, "method not allowed") : cl_error(404, "route not found");

        for (const auto& param : method->params) {
            if (param.location == ParamLocation::kPath) {
                if (auto reason = explain(*param.schema, values[param.name], param.name)) {
                    return cl_error(400, param.name == "state_id" ? "Invalid state ID: " + values[param.name]
                                                                  : "Invalid block ID: " + values[param.name]);
                }
            }
        }
        for (const auto& [key, value] : call.query) {
            const ParamSpec* param = method->param(key);
            if (param == nullptr || param->location != ParamLocation::kQuery) {
                return cl_error(400, "unknown query parameter: " + key);
            }
            if (explain(*param->schema, value, key)) return cl_error(400, "Invalid query: " + key);
        }
        for (const auto& param : method->params) {
            if (param.location == ParamLocation::kQuery && param.required && !call.query.contains(param.name)) {
                return cl_error(400, "missing query parameter: " + param.name);
            }
        }
        json body;
        for (const auto& param : method->params) {
            if (param.location != ParamLocation::kBody) continue;
            body = json::parse(call.body, nullptr, false);
            if (body.is_discarded()) return cl_error(400, "invalid JSON body");
            if (auto reason = explain(*param.schema, body, "body")) return cl_error(400, *reason);
        }
        try {
            return {200, cl_method(method->name, values, call.query, body, chain)};
        } catch (const HttpError& e) {
            return cl_error(e.status, e.message);
        }
    }

}  // namespace

Reply canonical_response(const HttpCall& call, const SyntheticChain& chain) {
    if (call.verb == "POST" && (call.path == "/" || call.path.empty())) return execution_reply(call.body, chain);
    return consensus_reply(call, chain);
}

std::string method_of(const HttpCall& call) {
    if (call.verb == "POST" && (call.path == "/" || call.path.empty())) {
        auto request = json::parse(call.body, nullptr, false);
        if (request.is_object() && request.contains("method") && request["method"].is_string()) {
            return request["method"].get<std::string>();
        }
        return {};
    }
    std::map<std::string, std::string> values;
    for (const auto& [name, method] : served_api().methods) {
        if (method.path_template && match_route(*method.path_template, call.path, values)) {
            const std::string verb = method.transport == Transport::kRestGet ? "GET" : "POST";
            if (verb == call.verb) return name;
        }
    }
    return {};
}

}  // namespace specdiff::mock
