// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specdiff {

enum class ErrorCode {
    kParse,
    kUnsupportedConstruct,
    kInvariantViolation,
    kClassifierFailure,
    kUnsupportedRegex,
    kUnsatisfiable,
    kInapplicableCategory,
    kEmptyFactStore,
    kMissingAnchor,
    kOracleFailure,
    kConfig,
    kReadiness,
    kUndefinedRate,
    kSpawn,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace specdiff
