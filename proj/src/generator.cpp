// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/generator.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include "specdiff/error.hpp"
#include "specdiff/facts.hpp"
#include "specdiff/regex_gen.hpp"

namespace specdiff {

namespace {

    constexpr int kMaxAttempts = 16;
    constexpr int kMaxAnyDepth = 3;
    constexpr std::uint64_t kDefaultArraySlack = 4;

    [[noreturn]] void unsatisfiable(const std::string& where, const std::string& why) {
        throw Error(ErrorCode::kUnsatisfiable,
                    "unsatisfiable schema" + (where.empty() ? std::string() : " at " + where) + ": " + why);
    }

    void append_utf8(std::string& out, std::uint32_t cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    // Parsed generators are cached per pattern; parsing is deterministic so
    // the cache never affects output.
    const RegexGenerator& regex_for(const std::string& pattern) {
        static std::mutex mutex;
        static std::map<std::string, std::shared_ptr<const RegexGenerator>> cache;
        std::lock_guard lock(mutex);
        auto it = cache.find(pattern);
        if (it == cache.end()) it = cache.emplace(pattern, std::make_shared<const RegexGenerator>(pattern)).first;
        return *it->second;
    }

    json gen_any(Rng& rng, int depth) {
        const auto choice = rng.uniform(0, depth >= kMaxAnyDepth ? 3 : 5);
        switch (choice) {
            case 0: return nullptr;
            case 1: return rng.chance(1, 2);
            case 2: return rng.uniform_signed(-1'000'000, 1'000'000);
            case 3: return gen_unicode_string(rng);
            case 4: {
                json array = json::array();
                const auto n = rng.uniform(0, 3);
                for (std::uint64_t i = 0; i < n; ++i) array.push_back(gen_any(rng, depth + 1));
                return array;
            }
            default: {
                json object = json::object();
                const auto n = rng.uniform(0, 3);
                for (std::uint64_t i = 0; i < n; ++i) object["k" + std::to_string(rng.uniform(0, 999))] = gen_any(rng, depth + 1);
                return object;
            }
        }
    }

    json gen_by_kind(const SchemaNode& schema, Rng& rng, std::vector<std::string>* notes, const std::string& where) {
        switch (schema.kind) {
            case SchemaKind::kString: {
                if (!schema.pattern) return gen_unicode_string(rng);
                const auto& generator = regex_for(*schema.pattern);
                for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
                    auto text = generator.generate(rng);
                    if (std::regex_search(text, *schema.compiled_pattern)) return text;
                }
                unsatisfiable(where, "no generated string matched pattern " + *schema.pattern);
            }
            case SchemaKind::kInteger:
                if (rng.chance(1, 2)) return rng.uniform_signed(-100, 100);
                return rng.uniform_signed(-(std::int64_t{1} << 53), std::int64_t{1} << 53);
            case SchemaKind::kNumber:
                if (rng.chance(1, 4)) return rng.uniform_signed(-1000, 1000);
                return (rng.unit() - 0.5) * 2.0e7;
            case SchemaKind::kBoolean: return rng.chance(1, 2);
            case SchemaKind::kNull: return nullptr;
            case SchemaKind::kArray: {
                const std::uint64_t min = schema.min_items.value_or(0);
                const std::uint64_t max = schema.max_items.value_or(min + kDefaultArraySlack);
                const auto count = rng.uniform(min, max);
                json array = json::array();
                for (std::uint64_t i = 0; i < count; ++i) {
                    const auto item_where = where + "/" + std::to_string(i);
                    array.push_back(schema.items ? gen_valid_value(*schema.items, rng, notes, item_where) : gen_any(rng, 1));
                }
                return array;
            }
            case SchemaKind::kObject: {
                json object = json::object();
                for (const auto& prop : schema.properties) {
                    if (!schema.is_required(prop.name) && !rng.chance(1, 2)) continue;
                    object[prop.name] = gen_valid_value(*prop.schema, rng, notes, where + "/" + prop.name);
                }
                return object;
            }
            case SchemaKind::kAny: return gen_any(rng, 0);
        }
        return nullptr;
    }

    // Every param present, optional ones included, so injected extras cannot
    // be mistaken for a declared positional slot.
    TestRequest full_request(const MethodSpec& method, Rng& rng, std::uint64_t request_id, std::uint64_t seed) {
        TestRequest request;
        request.request_id = request_id;
        request.method = method.name;
        request.seed = seed;
        for (const auto& param : method.params) {
            request.args[param.name] = gen_valid_value(*param.schema, rng, &request.provenance, param.name);
        }
        return request;
    }

    bool constrained(const ParamSpec& param) {
        const auto& schema = *param.schema;
        return schema.kind != SchemaKind::kAny || schema.enum_values.has_value() || !schema.any_of.empty();
    }

    const char* json_type_name(const json& value) {
        switch (value.type()) {
            case json::value_t::null: return "null";
            case json::value_t::boolean: return "boolean";
            case json::value_t::number_float: return "number";
            case json::value_t::number_integer:
            case json::value_t::number_unsigned: return "integer";
            case json::value_t::string: return "string";
            case json::value_t::array: return "array";
            default: return "object";
        }
    }

    std::string random_key(Rng& rng) {
        static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz_";
        std::string key = "x_";
        const auto length = rng.uniform(3, 10);
        for (std::uint64_t i = 0; i < length; ++i) key.push_back(kAlphabet[rng.index(sizeof(kAlphabet) - 1)]);
        return key;
    }

}  // namespace

TestMix parse_mix(const std::string& text) {
    TestMix mix;
    std::stringstream stream(text);
    std::string part;
    std::vector<std::uint32_t> counts;
    while (std::getline(stream, part, ',')) {
        try {
            std::size_t used = 0;
            const long value = std::stol(part, &used);
            if (used != part.size() || value < 0) throw std::invalid_argument(part);
            counts.push_back(static_cast<std::uint32_t>(value));
        } catch (const std::exception&) {
            throw Error(ErrorCode::kConfig, "mix must be three non-negative integers a,b,c: " + text);
        }
    }
    if (counts.size() != 3) throw Error(ErrorCode::kConfig, "mix must be three non-negative integers a,b,c: " + text);
    mix.invalid = counts[0];
    mix.valid = counts[1];
    mix.semantic = counts[2];
    return mix;
}

std::string gen_unicode_string(Rng& rng) {
    std::string out;
    const auto length = rng.uniform(0, 64);
    for (std::uint64_t i = 0; i < length; ++i) {
        const auto bucket = rng.uniform(0, 9);
        std::uint32_t cp;
        if (bucket < 7) {
            cp = static_cast<std::uint32_t>(rng.uniform(0x20, 0x7E));
        } else if (bucket < 8) {
            cp = static_cast<std::uint32_t>(rng.uniform(0xA0, 0xD7FF));
        } else {
            cp = static_cast<std::uint32_t>(rng.uniform(0x10000, 0x1FFFF));
        }
        append_utf8(out, cp);
    }
    return out;
}

json gen_valid_value(const SchemaNode& schema, Rng& rng, std::vector<std::string>* notes, const std::string& where) {
    if (schema.enum_values) {
        std::vector<json> candidates;
        for (const auto& value : *schema.enum_values) {
            if (validate_value(schema, value)) candidates.push_back(value);
        }
        if (candidates.empty()) unsatisfiable(where, "no enum value satisfies the schema");
        return candidates[rng.index(candidates.size())];
    }
    if (!schema.any_of.empty()) {
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            const auto branch = rng.index(schema.any_of.size());
            json value = gen_valid_value(*schema.any_of[branch], rng, nullptr, where);
            if (validate_value(schema, value)) {
                if (notes) notes->push_back((where.empty() ? "value" : where) + ": anyOf branch " + std::to_string(branch));
                return value;
            }
        }
        unsatisfiable(where, "no anyOf branch produced a value valid for the whole schema");
    }
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        json value = gen_by_kind(schema, rng, notes, where);
        if (validate_value(schema, value)) return value;
    }
    unsatisfiable(where, "generated values never satisfied the schema");
}

TestRequest gen_valid_request(const MethodSpec& method, Rng& rng, std::uint64_t request_id, std::uint64_t seed) {
    TestRequest request;
    request.request_id = request_id;
    request.method = method.name;
    request.seed = seed;
    request.validity = Validity::kSyntacticValid;
    std::vector<bool> present(method.params.size());
    for (std::size_t i = 0; i < method.params.size(); ++i) present[i] = method.params[i].required || rng.chance(1, 2);
    if (method.transport == Transport::kJsonRpcPost) {
        // Positional arrays cannot skip a slot.
        auto last = std::find(present.rbegin(), present.rend(), true);
        const auto count = static_cast<std::size_t>(present.rend() - last);
        for (std::size_t i = 0; i < count; ++i) present[i] = true;
    }
    for (std::size_t i = 0; i < method.params.size(); ++i) {
        if (!present[i]) continue;
        const auto& param = method.params[i];
        request.args[param.name] = gen_valid_value(*param.schema, rng, &request.provenance, param.name);
    }
    build_wire(request, method);
    return request;
}

bool category_applicable(const MethodSpec& method, InvalidCategory category) {
    switch (category) {
        case InvalidCategory::kUndefinedField: return true;
        case InvalidCategory::kMissingRequired:
            return std::any_of(method.params.begin(), method.params.end(), [](const ParamSpec& p) { return p.required; });
        case InvalidCategory::kConstraintViolation:
            return std::any_of(method.params.begin(), method.params.end(), constrained);
    }
    return false;
}

TestRequest gen_invalid_request(const MethodSpec& method, InvalidCategory category, Rng& rng,
                                std::uint64_t request_id, std::uint64_t seed) {
    if (!category_applicable(method, category)) {
        throw Error(ErrorCode::kInapplicableCategory,
                    std::string(to_string(category)) + " does not apply to " + method.name);
    }
    TestRequest request = full_request(method, rng, request_id, seed);
    request.validity = Validity::kSyntacticInvalid;
    request.category = category;

    switch (category) {
        case InvalidCategory::kUndefinedField: {
            const auto key = random_key(rng);
            json value = gen_any(rng, 1);
            if (method.transport == Transport::kJsonRpcPost) {
                request.extra_positional.push_back(json{{key, value}});
                request.fault_note = "undefined field: extra param {" + key + "}";
            } else {
                const ParamSpec* body = nullptr;
                for (const auto& p : method.params) {
                    if (p.location == ParamLocation::kBody) body = &p;
                }
                if (body != nullptr && request.args[body->name].is_object()) {
                    request.args[body->name][key] = value;
                    if (validate_value(*body->schema, request.args[body->name])) {
                        // Schema allows extras; keep the key off the declared param.
                        request.args[body->name].erase(key);
                        request.extra_body[key] = value;
                    }
                    request.fault_note = "undefined field: body." + key;
                } else {
                    request.extra_query[key] = value;
                    request.fault_note = "undefined field: query " + key;
                }
            }
            break;
        }
        case InvalidCategory::kMissingRequired: {
            std::vector<std::size_t> required;
            for (std::size_t i = 0; i < method.params.size(); ++i) {
                if (method.params[i].required) required.push_back(i);
            }
            const auto target = required[rng.index(required.size())];
            const auto& name = method.params[target].name;
            if (method.transport == Transport::kJsonRpcPost) {
                for (std::size_t i = target; i < method.params.size(); ++i) request.args.erase(method.params[i].name);
            } else {
                request.args.erase(name);
            }
            request.fault_note = "missing required: " + name;
            break;
        }
        case InvalidCategory::kConstraintViolation: {
            std::vector<const ParamSpec*> targets;
            for (const auto& p : method.params) {
                if (constrained(p)) targets.push_back(&p);
            }
            const ParamSpec& target = *targets[rng.index(targets.size())];
            const json candidates[] = {true, false, 12345, -1, 1.5, "not-a-valid-value", nullptr, json::array(),
                                       json::object(), json::array({1, 2})};
            std::vector<json> wrong;
            for (const auto& c : candidates) {
                if (!validate_value(*target.schema, c) && !json_matches_kind(target.schema->kind, c)) wrong.push_back(c);
            }
            if (wrong.empty()) {
                for (const auto& c : candidates) {
                    if (!validate_value(*target.schema, c)) wrong.push_back(c);
                }
            }
            if (wrong.empty()) unsatisfiable(target.name, "no replacement value violates the schema");
            json replacement = wrong[rng.index(wrong.size())];
            request.fault_note = "constraint violation: " + target.name + " replaced by " + json_type_name(replacement) +
                                 " " + replacement.dump();
            request.args[target.name] = std::move(replacement);
            break;
        }
    }
    build_wire(request, method);
    return request;
}

std::uint64_t method_seed(std::uint64_t seed, const std::string& method) { return seed ^ fnv1a(method); }

Batch gen_batch(const ApiSpec& spec, const TestMix& mix, std::uint64_t seed, const FactStore* facts) {
    Batch batch;
    std::uint64_t next_id = 1;
    const bool have_facts = facts != nullptr && !facts->empty();
    if (mix.semantic > 0 && !have_facts) {
        batch.warnings.push_back("no fact store: semantic slots degrade to syntactic_valid");
    }
    for (const auto& [name, method] : spec.methods) {
        const auto base = method_seed(seed, name);
        std::uint64_t slot = 0;
        auto next_seed = [&] { return splitmix64(base + slot++); };

        std::vector<InvalidCategory> categories;
        for (auto category : kAllCategories) {
            if (category_applicable(method, category)) categories.push_back(category);
        }
        for (std::uint32_t i = 0; i < mix.invalid; ++i) {
            const auto request_seed = next_seed();
            Rng rng(request_seed);
            batch.requests.push_back(
                gen_invalid_request(method, categories[i % categories.size()], rng, next_id++, request_seed));
        }
        for (std::uint32_t i = 0; i < mix.valid; ++i) {
            const auto request_seed = next_seed();
            Rng rng(request_seed);
            batch.requests.push_back(gen_valid_request(method, rng, next_id++, request_seed));
        }
        std::uint32_t degraded = 0;
        for (std::uint32_t i = 0; i < mix.semantic; ++i) {
            const auto request_seed = next_seed();
            Rng rng(request_seed);
            auto request = gen_valid_request(method, rng, next_id++, request_seed);
            if (have_facts) {
                auto enriched = enrich(request, method, *facts, rng);
                if (enriched.validity != Validity::kSemanticValid) ++degraded;
                request = std::move(enriched);
            }
            batch.requests.push_back(std::move(request));
        }
        if (have_facts && degraded > 0) {
            batch.warnings.push_back(name + ": " + std::to_string(degraded) +
                                     " semantic slot(s) degraded to syntactic_valid (no applicable facts)");
        }
    }
    return batch;
}

std::string batch_to_jsonl(const std::vector<TestRequest>& requests) {
    std::string out;
    for (const auto& request : requests) {
        out += request_to_json(request).dump();
        out.push_back('\n');
    }
    return out;
}

std::vector<TestRequest> batch_from_jsonl(const std::string& text) {
    std::vector<TestRequest> requests;
    std::stringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        try {
            requests.push_back(request_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::kParse, std::string("malformed JSON line: ") + e.what());
        }
    }
    return requests;
}

}  // namespace specdiff
