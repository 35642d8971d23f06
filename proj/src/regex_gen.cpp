// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "specdiff/regex_gen.hpp"

#include <variant>

#include "specdiff/error.hpp"

namespace specdiff {

namespace {

    using Range = std::pair<unsigned char, unsigned char>;
    using NodePtr = std::shared_ptr<const RegexGenerator::Node>;

    struct Literal {
        std::string bytes;
    };
    struct CharSet {
        std::vector<Range> ranges;
    };
    struct Sequence {
        std::vector<NodePtr> items;
    };
    struct Alternation {
        std::vector<NodePtr> branches;
    };
    struct Repeat {
        NodePtr inner;
        std::uint32_t min = 0;
        std::uint32_t max = 0;
    };

}  // namespace

struct RegexGenerator::Node {
    std::variant<Literal, CharSet, Sequence, Alternation, Repeat> value;
};

namespace {

    NodePtr node(auto value) {
        auto n = std::make_shared<RegexGenerator::Node>();
        n->value = std::move(value);
        return n;
    }

    const CharSet kDigits{{{'0', '9'}}};
    const CharSet kWord{{{'a', 'z'}, {'A', 'Z'}, {'0', '9'}, {'_', '_'}}};
    const CharSet kSpace{{{' ', ' '}, {'\t', '\t'}}};
    const CharSet kPrintable{{{0x20, 0x7e}}};

    class Parser {
      public:
        explicit Parser(std::string_view pattern) : pattern_(pattern) {}

        NodePtr parse() {
            auto result = parse_alternation();
            if (pos_ != pattern_.size()) fail("unbalanced ')'");
            return result;
        }

      private:
        [[noreturn]] void fail(const std::string& construct) const {
            throw Error(ErrorCode::kUnsupportedRegex, "unsupported regex construct " + construct + " in pattern \"" +
                                                          std::string(pattern_) + "\" at offset " +
                                                          std::to_string(pos_));
        }

        bool at_end() const { return pos_ >= pattern_.size(); }
        char peek() const { return pattern_[pos_]; }

        NodePtr parse_alternation() {
            std::vector<NodePtr> branches{parse_sequence()};
            while (!at_end() && peek() == '|') {
                ++pos_;
                branches.push_back(parse_sequence());
            }
            if (branches.size() == 1) return branches.front();
            return node(Alternation{std::move(branches)});
        }

        NodePtr parse_sequence() {
            Sequence seq;
            while (!at_end() && peek() != '|' && peek() != ')') {
                auto atom = parse_atom();
                if (!atom) continue;
                seq.items.push_back(parse_quantifier(std::move(atom)));
            }
            return node(std::move(seq));
        }

        NodePtr parse_atom() {
            const char c = peek();
            switch (c) {
                case '^':
                case '$':
                    // Anchors are zero-width; a generated string matching the
                    // body satisfies them when they sit at the pattern edges.
                    ++pos_;
                    return nullptr;
                case '(': return parse_group();
                case '[': return parse_class();
                case '.': ++pos_; return node(kPrintable);
                case '\\': return parse_escape_atom();
                case '*':
                case '+':
                case '?':
                case '{': fail(std::string("dangling quantifier '") + c + "'");
                default: break;
            }
            std::string bytes(1, c);
            ++pos_;
            // Keep multi-byte UTF-8 sequences together so a quantifier repeats
            // the whole code point.
            if (static_cast<unsigned char>(c) >= 0xC0) {
                while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) bytes.push_back(pattern_[pos_++]);
            }
            return node(Literal{std::move(bytes)});
        }

        NodePtr parse_group() {
            ++pos_;
            if (!at_end() && peek() == '?') {
                if (pos_ + 1 < pattern_.size() && pattern_[pos_ + 1] == ':') {
                    pos_ += 2;
                } else {
                    fail("lookaround or named group '(?'");
                }
            }
            auto inner = parse_alternation();
            if (at_end() || peek() != ')') fail("unterminated group");
            ++pos_;
            return inner;
        }

        // Returns a character set for class escapes, or a single literal byte.
        std::variant<CharSet, unsigned char> parse_escape() {
            ++pos_;
            if (at_end()) fail("trailing backslash");
            const char c = pattern_[pos_++];
            switch (c) {
                case 'd': return kDigits;
                case 'w': return kWord;
                case 's': return kSpace;
                case 'n': return static_cast<unsigned char>('\n');
                case 't': return static_cast<unsigned char>('\t');
                case 'r': return static_cast<unsigned char>('\r');
                case 'D':
                case 'W':
                case 'S': fail(std::string("negated class escape \\") + c);
                case 'b':
                case 'B': fail(std::string("word boundary \\") + c);
                case 'x': {
                    if (pos_ + 2 > pattern_.size()) fail("truncated \\x escape");
                    const auto hex = std::string(pattern_.substr(pos_, 2));
                    pos_ += 2;
                    const auto value = std::stoul(hex, nullptr, 16);
                    if (value > 0x7f) fail("non-ASCII \\x escape");
                    return static_cast<unsigned char>(value);
                }
                default: break;
            }
            if (c >= '0' && c <= '9') fail(std::string("backreference \\") + c);
            if (std::isalpha(static_cast<unsigned char>(c))) fail(std::string("escape \\") + c);
            return static_cast<unsigned char>(c);
        }

        NodePtr parse_escape_atom() {
            auto escaped = parse_escape();
            if (auto* set = std::get_if<CharSet>(&escaped)) return node(*set);
            return node(Literal{std::string(1, static_cast<char>(std::get<unsigned char>(escaped)))});
        }

        NodePtr parse_class() {
            ++pos_;
            if (!at_end() && peek() == '^') fail("negated character class");
            CharSet set;
            while (true) {
                if (at_end()) fail("unterminated character class");
                if (peek() == ']') {
                    ++pos_;
                    break;
                }
                unsigned char low;
                if (peek() == '\\') {
                    auto escaped = parse_escape();
                    if (auto* inner = std::get_if<CharSet>(&escaped)) {
                        set.ranges.insert(set.ranges.end(), inner->ranges.begin(), inner->ranges.end());
                        continue;
                    }
                    low = std::get<unsigned char>(escaped);
                } else {
                    low = static_cast<unsigned char>(pattern_[pos_++]);
                    if (low >= 0x80) fail("non-ASCII character in class");
                }
                if (pos_ + 1 < pattern_.size() && peek() == '-' && pattern_[pos_ + 1] != ']') {
                    ++pos_;
                    unsigned char high;
                    if (peek() == '\\') {
                        auto escaped = parse_escape();
                        if (std::holds_alternative<CharSet>(escaped)) fail("class escape as range bound");
                        high = std::get<unsigned char>(escaped);
                    } else {
                        high = static_cast<unsigned char>(pattern_[pos_++]);
                    }
                    if (high < low) fail("reversed range");
                    set.ranges.emplace_back(low, high);
                } else {
                    set.ranges.emplace_back(low, low);
                }
            }
            if (set.ranges.empty()) fail("empty character class");
            return node(std::move(set));
        }

        std::uint32_t parse_number() {
            std::uint32_t value = 0;
            const auto start = pos_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
                value = value * 10 + static_cast<std::uint32_t>(peek() - '0');
                if (value > 10'000) fail("oversized repetition bound");
                ++pos_;
            }
            if (pos_ == start) fail("malformed repetition bound");
            return value;
        }

        NodePtr parse_quantifier(NodePtr atom) {
            if (at_end()) return atom;
            std::uint32_t min = 0;
            std::uint32_t max = 0;
            switch (peek()) {
                case '*': ++pos_; min = 0; max = RegexGenerator::kUnboundedSlack; break;
                case '+': ++pos_; min = 1; max = 1 + RegexGenerator::kUnboundedSlack; break;
                case '?': ++pos_; min = 0; max = 1; break;
                case '{': {
                    ++pos_;
                    min = parse_number();
                    max = min;
                    if (!at_end() && peek() == ',') {
                        ++pos_;
                        max = (!at_end() && peek() == '}') ? min + RegexGenerator::kUnboundedSlack : parse_number();
                    }
                    if (at_end() || peek() != '}') fail("unterminated repetition");
                    ++pos_;
                    if (max < min) fail("repetition with max < min");
                    break;
                }
                default: return atom;
            }
            if (!at_end() && peek() == '?') ++pos_;  // lazy modifier changes nothing for generation
            if (!at_end() && (peek() == '*' || peek() == '+' || peek() == '{')) fail("stacked quantifier");
            return node(Repeat{std::move(atom), min, max});
        }

        std::string_view pattern_;
        std::size_t pos_ = 0;
    };

    void emit(const RegexGenerator::Node& n, Rng& rng, std::string& out) {
        if (const auto* literal = std::get_if<Literal>(&n.value)) {
            out += literal->bytes;
        } else if (const auto* set = std::get_if<CharSet>(&n.value)) {
            std::uint64_t total = 0;
            for (const auto& [lo, hi] : set->ranges) total += static_cast<std::uint64_t>(hi - lo) + 1;
            auto draw = rng.uniform(0, total - 1);
            for (const auto& [lo, hi] : set->ranges) {
                const std::uint64_t width = static_cast<std::uint64_t>(hi - lo) + 1;
                if (draw < width) {
                    out.push_back(static_cast<char>(lo + draw));
                    return;
                }
                draw -= width;
            }
        } else if (const auto* seq = std::get_if<Sequence>(&n.value)) {
            for (const auto& item : seq->items) emit(*item, rng, out);
        } else if (const auto* alt = std::get_if<Alternation>(&n.value)) {
            emit(*alt->branches[rng.index(alt->branches.size())], rng, out);
        } else if (const auto* rep = std::get_if<Repeat>(&n.value)) {
            const auto count = rng.uniform(rep->min, rep->max);
            for (std::uint64_t i = 0; i < count; ++i) emit(*rep->inner, rng, out);
        }
    }

}  // namespace

RegexGenerator::RegexGenerator(std::string_view pattern) : root_(Parser(pattern).parse()) {}

std::string RegexGenerator::generate(Rng& rng) const {
    std::string out;
    emit(*root_, rng, out);
    return out;
}

}  // namespace specdiff
