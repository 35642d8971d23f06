// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

// Thin HTTP layer over cpp-httplib, kept to one translation unit.
namespace specdiff::http {

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

enum class Failure { kTimeout, kConnectFailure };

struct Result {
    std::optional<Response> response;
    std::optional<Failure> failure;
    double latency_ms = 0;
};

struct Header {
    std::string name;
    std::string value;
};

// verb is "GET" or "POST". Never throws for transport problems.
Result send(const std::string& base_url, const std::string& verb, const std::string& path, const std::string& body,
            std::uint32_t timeout_ms, const std::vector<Header>& headers = {});

struct Request {
    std::string verb;
    std::string path;  // decoded, without query
    std::map<std::string, std::string> query;
    std::string body;
};

using Handler = std::function<Response(const Request&)>;

// Loopback server on an ephemeral port, serving every path with `handler`.
class Server {
  public:
    explicit Server(Handler handler);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds and starts the listener thread; returns the port. Throws
    // Error(kSpawn) when no port can be bound.
    int start(const std::string& host = "127.0.0.1");
    void stop();
    int port() const { return port_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace specdiff::http
