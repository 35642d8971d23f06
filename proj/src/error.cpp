// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/error.hpp"

namespace specdiff {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kParse: return "parse";
        case ErrorCode::kUnsupportedConstruct: return "unsupported-construct";
        case ErrorCode::kInvariantViolation: return "invariant-violation";
        case ErrorCode::kClassifierFailure: return "classifier-failure";
        case ErrorCode::kUnsupportedRegex: return "unsupported-regex";
        case ErrorCode::kUnsatisfiable: return "unsatisfiable";
        case ErrorCode::kInapplicableCategory: return "inapplicable-category";
        case ErrorCode::kEmptyFactStore: return "empty-factstore";
        case ErrorCode::kMissingAnchor: return "missing-anchor";
        case ErrorCode::kOracleFailure: return "oracle-failure";
        case ErrorCode::kConfig: return "config";
        case ErrorCode::kReadiness: return "readiness";
        case ErrorCode::kUndefinedRate: return "undefined-rate";
        case ErrorCode::kSpawn: return "spawn";
    }
    return "unknown";
}

}  // namespace specdiff
