// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace testpaths {

inline std::string source(const std::string& relative) { return std::string(SPECDIFF_SOURCE_DIR) + "/" + relative; }

inline std::string cli() { return SPECDIFF_CLI; }

}  // namespace testpaths
