// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specdiff/endpoint.hpp"
#include "specdiff/error.hpp"
#include "specdiff/request.hpp"

namespace specdiff {

enum class TransportError { kTimeout, kConnectFailure, kNonJson };

std::string_view to_string(TransportError error);
std::optional<TransportError> transport_error_from_string(std::string_view text);

// One endpoint's answer to one request.
struct ResponseRecord {
    int endpoint_id = 0;
    std::uint64_t request_id = 0;
    std::optional<int> http_status;
    std::optional<json> body;
    std::string raw_body;
    std::optional<TransportError> transport_error;
    double latency_ms = 0;

    bool unavailable() const {
        return transport_error == TransportError::kTimeout || transport_error == TransportError::kConnectFailure;
    }
};

json record_to_json(const ResponseRecord& record);
ResponseRecord record_from_json(const json& document);

struct EndpointReadiness {
    int endpoint_id = 0;
    std::string label;
    Layer layer = Layer::kExecution;
    bool reachable = false;
    std::optional<std::uint64_t> head_height;
    std::optional<std::uint64_t> finalized_epochs;
    bool syncing = false;
};

struct ReadinessReport {
    std::vector<EndpointReadiness> endpoints;
    std::vector<std::string> failures;  // "height mismatch", "unreachable: ...", ...
    bool ready = false;

    bool is_syncing(int endpoint_id) const;
};

json readiness_to_json(const ReadinessReport& report);

inline constexpr std::uint64_t kDefaultThresholdEpochs = 5;

// Gate before testing: every endpoint reachable, equal head heights within
// each layer, consensus endpoints finalized at least `threshold_epochs`.
ReadinessReport check_readiness(const std::vector<Endpoint>& fleet, std::uint64_t threshold_epochs);

// Thrown by run_round when the gate fails and was not skipped.
class ReadinessFailure : public Error {
  public:
    explicit ReadinessFailure(ReadinessReport report);
    const ReadinessReport& report() const { return report_; }

  private:
    ReadinessReport report_;
};

// Sends the identical request to every endpoint concurrently. Returns one
// record per endpoint, ordered by endpoint_id. Transport failures are
// recorded, never thrown. Throws kConfig if an endpoint's layer does not
// serve the request's transport.
std::vector<ResponseRecord> dispatch(const TestRequest& request, const std::vector<Endpoint>& fleet);

struct RoundEntry {
    TestRequest request;
    std::vector<ResponseRecord> records;
};

struct RoundLog {
    std::vector<RoundEntry> entries;
    std::optional<ReadinessReport> readiness;
};

struct RoundOptions {
    bool skip_readiness = false;
    std::uint64_t threshold_epochs = kDefaultThresholdEpochs;
    // Requests in flight at once; 1 keeps mock-fleet interactions ordered.
    std::uint32_t max_in_flight = 1;
};

// Checks readiness (unless skipped), then dispatches every request to the
// endpoints of its layer. Throws ReadinessFailure.
RoundLog run_round(const ApiSpec& spec, const std::vector<Endpoint>& fleet, const std::vector<TestRequest>& batch,
                   const RoundOptions& options = {});

std::string roundlog_to_jsonl(const RoundLog& log);
RoundLog roundlog_from_jsonl(const std::string& text);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace specdiff
