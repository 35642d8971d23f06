// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specdiff/request.hpp"
#include "specdiff/rng.hpp"

namespace specdiff {

class FactStore;

// Per-method request counts for one batch.
struct TestMix {
    std::uint32_t invalid = 5;
    std::uint32_t valid = 5;
    std::uint32_t semantic = 10;
};

// Parses "a,b,c".
TestMix parse_mix(const std::string& text);

// Random JSON value satisfying `schema`. Branch choices for anyOf are appended
// to `notes` (as "<where>: anyOf branch <i>") when notes is non-null.
json gen_valid_value(const SchemaNode& schema, Rng& rng, std::vector<std::string>* notes = nullptr,
                     const std::string& where = {});

// Random string of 0..64 code points drawn from printable ASCII, the BMP and
// the supplementary planes.
std::string gen_unicode_string(Rng& rng);

TestRequest gen_valid_request(const MethodSpec& method, Rng& rng, std::uint64_t request_id = 1,
                              std::uint64_t seed = 0);

bool category_applicable(const MethodSpec& method, InvalidCategory category);

// Injects exactly one violation of `category`; throws kInapplicableCategory.
TestRequest gen_invalid_request(const MethodSpec& method, InvalidCategory category, Rng& rng,
                                std::uint64_t request_id = 1, std::uint64_t seed = 0);

struct Batch {
    std::vector<TestRequest> requests;
    std::vector<std::string> warnings;
};

// Per method (in name order): `invalid` requests cycling through applicable
// categories, `valid` requests, then `semantic` requests enriched from
// `facts` (degraded to syntactic_valid when no fact applies). Pure function of
// its inputs.
Batch gen_batch(const ApiSpec& spec, const TestMix& mix, std::uint64_t seed, const FactStore* facts = nullptr);

std::uint64_t method_seed(std::uint64_t seed, const std::string& method);

std::string batch_to_jsonl(const std::vector<TestRequest>& requests);
std::vector<TestRequest> batch_from_jsonl(const std::string& text);

}  // namespace specdiff
