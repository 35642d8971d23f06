// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/http.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "specdiff/error.hpp"

namespace specdiff::http {

namespace {

    struct Target {
        std::string host;
        int port = 80;
    };

    Target split_url(const std::string& base_url) {
        std::string rest = base_url;
        if (auto scheme = rest.find("://"); scheme != std::string::npos) rest = rest.substr(scheme + 3);
        if (auto slash = rest.find('/'); slash != std::string::npos) rest = rest.substr(0, slash);
        Target target;
        if (auto colon = rest.rfind(':'); colon != std::string::npos) {
            target.host = rest.substr(0, colon);
            target.port = std::stoi(rest.substr(colon + 1));
        } else {
            target.host = rest;
        }
        return target;
    }

    std::string path_prefix(const std::string& base_url) {
        std::string rest = base_url;
        if (auto scheme = rest.find("://"); scheme != std::string::npos) rest = rest.substr(scheme + 3);
        auto slash = rest.find('/');
        if (slash == std::string::npos) return {};
        auto prefix = rest.substr(slash);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
        return prefix;
    }

}  // namespace

Result send(const std::string& base_url, const std::string& verb, const std::string& path, const std::string& body,
            std::uint32_t timeout_ms, const std::vector<Header>& headers) {
    Result result;
    const auto started = std::chrono::steady_clock::now();
    Target target;
    try {
        target = split_url(base_url);
    } catch (const std::exception&) {
        result.failure = Failure::kConnectFailure;
        return result;
    }
    httplib::Client client(target.host, target.port);
    const auto seconds = static_cast<time_t>(timeout_ms / 1000);
    const auto micros = static_cast<time_t>((timeout_ms % 1000) * 1000);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    client.set_keep_alive(false);

    httplib::Headers header_map;
    for (const auto& header : headers) header_map.emplace(header.name, header.value);
    const auto full_path = path_prefix(base_url) + (path.empty() ? "/" : path);

    httplib::Result response = verb == "GET" ? client.Get(full_path, header_map)
                                             : client.Post(full_path, header_map, body, "application/json");
    result.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    if (!response) {
        const auto error = response.error();
        const bool timed_out = error == httplib::Error::Read || error == httplib::Error::ConnectionTimeout ||
                               error == httplib::Error::Write;
        result.failure = timed_out ? Failure::kTimeout : Failure::kConnectFailure;
        return result;
    }
    Response out;
    out.status = response->status;
    out.body = response->body;
    out.content_type = response->get_header_value("Content-Type");
    result.response = std::move(out);
    return result;
}

struct Server::Impl {
    httplib::Server server;
    std::thread thread;
};

Server::Server(Handler handler) : impl_(std::make_unique<Impl>()) {
    auto dispatch = [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
        Request request;
        request.verb = req.method;
        request.path = req.path;
        for (const auto& [key, value] : req.params) request.query.emplace(key, value);
        request.body = req.body;
        Response response = handler(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    };
    impl_->server.Get(".*", dispatch);
    impl_->server.Post(".*", dispatch);
}

Server::~Server() { stop(); }

int Server::start(const std::string& host) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ <= 0) throw Error(ErrorCode::kSpawn, "could not bind a port on " + host);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void Server::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace specdiff::http
