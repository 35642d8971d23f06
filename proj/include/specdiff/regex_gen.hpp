// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "specdiff/rng.hpp"

namespace specdiff {

// Produces random strings matching a regular expression from a small subset:
// anchors, literals, escapes (\d \w \s and escaped metacharacters), positive
// character classes with ranges, '.', groups, alternation and the quantifiers
// * + ? {m} {m,} {m,n}. Anything else (negated classes, lookaround,
// backreferences, \b, \D ...) throws Error(kUnsupportedRegex).
class RegexGenerator {
  public:
    explicit RegexGenerator(std::string_view pattern);

    std::string generate(Rng& rng) const;

    // Longest repetition used for unbounded quantifiers past their minimum.
    static constexpr std::uint32_t kUnboundedSlack = 8;

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
};

}  // namespace specdiff
