// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <mutex>

#include "specdiff/error.hpp"
#include "specdiff/http.hpp"
#include "specdiff/mock.hpp"

namespace specdiff::mock {

namespace {

    struct ActionName {
        Action action;
        std::string_view name;
    };

    constexpr ActionName kActionNames[] = {
        {Action::kDropField, "drop_field"},       {Action::kExtraField, "extra_field"},
        {Action::kReformat, "reformat"},          {Action::kWrongValue, "wrong_value"},
        {Action::kWrongStatus, "wrong_status"},   {Action::kErrorMessage, "error_message"},
        {Action::kStall, "stall"},                {Action::kCrashMessage, "crash_message"},
    };

    Action action_from_string(const std::string& text) {
        for (const auto& entry : kActionNames) {
            if (entry.name == text) return entry.action;
        }
        throw Error(ErrorCode::kConfig, "unknown injection action " + text);
    }

    bool is_el(const HttpCall& call) { return call.verb == "POST" && (call.path == "/" || call.path.empty()); }

    // What a trigger predicate is evaluated against.
    json request_view(const HttpCall& call) {
        if (is_el(call)) {
            auto body = json::parse(call.body, nullptr, false);
            return body.is_discarded() ? json() : body;
        }
        json view = {{"path", call.path}, {"query", call.query}};
        auto body = json::parse(call.body, nullptr, false);
        view["body"] = body.is_discarded() ? json() : body;
        return view;
    }

    bool triggered(const json& trigger, const HttpCall& call) {
        if (trigger.is_null()) return true;
        const json view = request_view(call);
        const json::json_pointer pointer(trigger.value("pointer", std::string()));
        const bool exists = view.contains(pointer);
        if (trigger.contains("exists")) return exists == trigger["exists"].get<bool>();
        if (trigger.contains("equals")) return exists && view.at(pointer) == trigger["equals"];
        return exists;
    }

    std::string reformat(const std::string& text, const std::string& transform, const json& replacement) {
        if (transform == "rephrase") return replacement.is_string() ? replacement.get<std::string>() : text;
        if (!text.starts_with("0x")) return text;
        if (transform == "pad_hex") return "0x00" + text.substr(2);
        if (transform == "upper_hex") {
            std::string out = text;
            std::transform(out.begin() + 2, out.end(), out.begin() + 2, [](unsigned char c) { return std::toupper(c); });
            return out;
        }
        if (transform == "to_decimal") {
            try {
                return std::to_string(std::stoull(text.substr(2), nullptr, 16));
            } catch (const std::exception&) {
                return text;
            }
        }
        return text;
    }

}  // namespace

std::string_view to_string(Action action) {
    for (const auto& entry : kActionNames) {
        if (entry.action == action) return entry.name;
    }
    return "drop_field";
}

bool Injection::targets(int node, const std::string& node_label_value) const {
    if (node_id) return *node_id == node;
    if (node_label) return *node_label == node_label_value;
    return false;
}

Injection injection_from_json(const json& document) {
    try {
        Injection injection;
        const auto& selector = document.at("node_selector");
        if (selector.is_number_integer()) {
            injection.node_id = selector.get<int>();
        } else {
            injection.node_label = selector.get<std::string>();
        }
        injection.method = document.at("method").get<std::string>();
        injection.action = action_from_string(document.at("action").get<std::string>());
        injection.path = document.value("path", "");
        injection.value = document.value("value", json());
        injection.transform = document.value("transform", "");
        injection.status = document.value("status", 500);
        injection.text = document.value("text", "");
        injection.stall_ms = document.value("stall_ms", 0U);
        injection.trigger = document.value("trigger", json());
        injection.label = document.value("label", "");
        if (injection.label != "" && injection.label != "genuine" && injection.label != "benign") {
            throw Error(ErrorCode::kConfig, "injection label must be genuine or benign");
        }
        const bool needs_path = injection.action == Action::kDropField || injection.action == Action::kExtraField ||
                                injection.action == Action::kReformat || injection.action == Action::kWrongValue;
        if (needs_path && !injection.path.starts_with("/")) {
            throw Error(ErrorCode::kConfig, "injection on " + injection.method + " needs a JSON pointer path");
        }
        (void)json::json_pointer(injection.path);
        return injection;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kConfig, std::string("malformed injection: ") + e.what());
    }
}

json injection_to_json(const Injection& injection) {
    json out = {{"method", injection.method}, {"action", to_string(injection.action)}};
    out["node_selector"] = injection.node_id ? json(*injection.node_id) : json(injection.node_label.value_or(""));
    if (!injection.path.empty()) out["path"] = injection.path;
    if (!injection.value.is_null()) out["value"] = injection.value;
    if (!injection.transform.empty()) out["transform"] = injection.transform;
    if (injection.action == Action::kWrongStatus) out["status"] = injection.status;
    if (!injection.text.empty()) out["text"] = injection.text;
    if (injection.action == Action::kStall) out["stall_ms"] = injection.stall_ms;
    if (!injection.trigger.is_null()) out["trigger"] = injection.trigger;
    if (!injection.label.empty()) out["label"] = injection.label;
    return out;
}

Scenario scenario_from_json(const json& document) {
    if (!document.is_object()) throw Error(ErrorCode::kConfig, "scenario must be a JSON object");
    try {
        Scenario scenario;
        scenario.chain.seed = document.value("chain_seed", scenario.chain.seed);
        if (document.contains("chain")) {
            const auto& chain = document["chain"];
            scenario.chain.tip = chain.value("tip", scenario.chain.tip);
            scenario.chain.accounts = chain.value("accounts", scenario.chain.accounts);
            scenario.chain.transactions = chain.value("transactions", scenario.chain.transactions);
            scenario.chain.current_slot = chain.value("current_slot", scenario.chain.current_slot);
            scenario.chain.finalized_epochs = chain.value("finalized_epochs", scenario.chain.finalized_epochs);
        }
        scenario.node_count = document.value("node_count", scenario.node_count);
        if (scenario.node_count < 1) throw Error(ErrorCode::kConfig, "scenario needs at least one node");
        for (const auto& entry : document.value("injections", json::array())) {
            scenario.injections.push_back(injection_from_json(entry));
        }
        const json overrides = document.value("node_overrides", json::object());
        for (const auto& [key, value] : overrides.items()) {
            scenario.node_overrides[std::stoi(key)] = value;
        }
        return scenario;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kConfig, std::string("malformed scenario: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::kConfig, "node_overrides keys must be node ids");
    }
}

json scenario_to_json(const Scenario& scenario) {
    json injections = json::array();
    for (const auto& injection : scenario.injections) injections.push_back(injection_to_json(injection));
    json overrides = json::object();
    for (const auto& [id, value] : scenario.node_overrides) overrides[std::to_string(id)] = value;
    return {{"chain_seed", scenario.chain.seed},
            {"node_count", scenario.node_count},
            {"injections", injections},
            {"node_overrides", overrides}};
}

Injected apply_injections(const std::vector<const Injection*>& injections, const HttpCall& call, Reply reply) {
    Injected out{std::move(reply), 0};
    auto& body = out.reply.body;
    for (const Injection* injection : injections) {
        if (!triggered(injection->trigger, call)) continue;
        const json::json_pointer pointer(injection->path);
        switch (injection->action) {
            case Action::kDropField:
                if (!injection->path.empty() && body.contains(pointer)) {
                    body.at(pointer.parent_pointer()).erase(pointer.back());
                }
                break;
            case Action::kExtraField:
                if (body.contains(pointer.parent_pointer()) && body.at(pointer.parent_pointer()).is_object()) {
                    body[pointer] = injection->value;
                }
                break;
            case Action::kWrongValue:
                if (body.contains(pointer)) body[pointer] = injection->value;
                break;
            case Action::kReformat:
                if (body.contains(pointer) && body.at(pointer).is_string()) {
                    body[pointer] = reformat(body.at(pointer).get<std::string>(), injection->transform, injection->value);
                }
                break;
            case Action::kWrongStatus:
                out.reply.status = injection->status;
                break;
            case Action::kErrorMessage:
                if (body.contains(json::json_pointer("/error/message"))) {
                    body["error"]["message"] = injection->text;
                } else if (out.reply.status >= 400 && body.contains("message")) {
                    body["message"] = injection->text;
                }
                break;
            case Action::kStall:
                out.stall_ms = std::max(out.stall_ms, injection->stall_ms);
                break;
            case Action::kCrashMessage:
                if (is_el(call)) {
                    const json id = body.is_object() ? body.value("id", json()) : json();
                    out.reply = {500, {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", -32603}, {"message", injection->text}}}}};
                } else {
                    out.reply = {500, {{"code", 500}, {"message", injection->text}}};
                }
                break;
        }
    }
    return out;
}

struct Fleet::Impl {
    Scenario scenario;
    SyntheticChain chain;
    std::vector<std::unique_ptr<http::Server>> servers;
    std::vector<std::string> urls;
    std::mutex mutex;
    std::condition_variable stopping;
    bool stopped = false;

    explicit Impl(const Scenario& s) : scenario(s), chain(s.chain) {}

    http::Response handle(int node, const http::Request& request) {
        const std::string label = "node-" + std::to_string(node);
        HttpCall call{request.verb, request.path, request.query, request.body};
        if (request.verb == "GET" && request.path == "/__control/status") {
            json status = {{"height", chain.config().tip},
                           {"head_slot", chain.config().current_slot},
                           {"finalized_epochs", chain.config().finalized_epochs},
                           {"syncing", false}};
            if (auto it = scenario.node_overrides.find(node); it != scenario.node_overrides.end()) {
                for (const auto& [key, value] : it->second.items()) status[key] = value;
            }
            return {200, status.dump(), "application/json"};
        }
        Reply reply = canonical_response(call, chain);
        const std::string method = method_of(call);
        std::vector<const Injection*> mine;
        for (const auto& injection : scenario.injections) {
            if (injection.targets(node, label) && injection.method == method) mine.push_back(&injection);
        }
        Injected injected = apply_injections(mine, call, std::move(reply));
        if (injected.stall_ms > 0) {
            std::unique_lock lock(mutex);
            stopping.wait_for(lock, std::chrono::milliseconds(injected.stall_ms), [this] { return stopped; });
        }
        return {injected.reply.status, injected.reply.body.dump(), "application/json"};
    }
};

Fleet::Fleet(const Scenario& scenario) : impl_(std::make_unique<Impl>(scenario)) {
    for (std::uint32_t node = 0; node < scenario.node_count; ++node) {
        auto server = std::make_unique<http::Server>(
            [impl = impl_.get(), node](const http::Request& request) { return impl->handle(static_cast<int>(node), request); });
        const int port = server->start("127.0.0.1");
        impl_->urls.push_back("http://127.0.0.1:" + std::to_string(port));
        impl_->servers.push_back(std::move(server));
    }
}

Fleet::~Fleet() { stop(); }

void Fleet::stop() {
    if (!impl_) return;
    {
        std::lock_guard lock(impl_->mutex);
        impl_->stopped = true;
    }
    impl_->stopping.notify_all();
    for (auto& server : impl_->servers) server->stop();
}

std::vector<Endpoint> Fleet::endpoints(Layer layer, std::uint32_t timeout_ms) const {
    std::vector<Endpoint> out;
    for (std::size_t node = 0; node < impl_->urls.size(); ++node) {
        Endpoint endpoint;
        const bool cl = layer == Layer::kConsensus;
        endpoint.endpoint_id = static_cast<int>(cl ? node + impl_->urls.size() : node);
        endpoint.label = "node-" + std::to_string(node) + "/" + std::string(to_string(layer));
        endpoint.base_url = impl_->urls[node];
        endpoint.layer = layer;
        endpoint.timeout_ms = timeout_ms;
        out.push_back(std::move(endpoint));
    }
    return out;
}

std::vector<Endpoint> Fleet::endpoints(std::uint32_t timeout_ms) const {
    auto out = endpoints(Layer::kExecution, timeout_ms);
    auto cl = endpoints(Layer::kConsensus, timeout_ms);
    out.insert(out.end(), cl.begin(), cl.end());
    return out;
}

const SyntheticChain& Fleet::chain() const { return impl_->chain; }
const Scenario& Fleet::scenario() const { return impl_->scenario; }

std::unique_ptr<Fleet> spawn_fleet(std::uint64_t chain_seed, std::uint32_t node_count,
                                   const std::vector<Injection>& injections) {
    Scenario scenario;
    scenario.chain.seed = chain_seed;
    scenario.node_count = node_count;
    scenario.injections = injections;
    return std::make_unique<Fleet>(scenario);
}

}  // namespace specdiff::mock
