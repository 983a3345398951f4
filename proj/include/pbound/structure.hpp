#pragma once

// Dot-bracket secondary structures. Indices are 1-based throughout; a
// structure is a properly nested pair set over {'(', ')', '.'}.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "pbound/common.hpp"

namespace pbound {

struct ParseOptions {
    int min_hairpin = 3;        // minimum unpaired bases enclosed by any pair
    bool allow_lonely = true;   // reject isolated pairs when false
};

class Structure {
  public:
    Structure() = default;

    int length() const { return static_cast<int>(db_.size()); }
    const std::string& dotbracket() const { return db_; }

    // 0 when unpaired, otherwise the 1-based partner index.
    int partner(int i) const { return partner_[i - 1]; }
    bool paired(int i) const { return partner_[i - 1] != 0; }

    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

    std::vector<int> unpaired() const {
        std::vector<int> u;
        for (int i = 1; i <= length(); ++i)
            if (!paired(i)) u.push_back(i);
        return u;
    }

    friend bool operator==(const Structure& a, const Structure& b) { return a.db_ == b.db_; }
    friend bool operator!=(const Structure& a, const Structure& b) { return a.db_ != b.db_; }
    friend bool operator<(const Structure& a, const Structure& b) { return a.db_ < b.db_; }

    // Builds a structure directly from a pair list (used by folding and
    // enumeration). The caller guarantees nesting.
    static Structure from_pairs(int length, const std::vector<std::pair<int, int>>& pairs) {
        Structure y;
        y.db_.assign(length, '.');
        y.partner_.assign(length, 0);
        for (auto [i, j] : pairs) {
            y.db_[i - 1] = '(';
            y.db_[j - 1] = ')';
            y.partner_[i - 1] = j;
            y.partner_[j - 1] = i;
        }
        y.pairs_ = pairs;
        std::sort(y.pairs_.begin(), y.pairs_.end());
        return y;
    }

    friend Structure parse_dotbracket(const std::string& text, const ParseOptions& opts);

  private:
    std::string db_;
    std::vector<int> partner_;
    std::vector<std::pair<int, int>> pairs_;  // sorted by opening index, i < j
};

inline Structure parse_dotbracket(const std::string& text, const ParseOptions& opts = {}) {
    if (text.empty()) throw ParseError("empty structure");
    Structure y;
    y.db_ = text;
    y.partner_.assign(text.size(), 0);
    std::vector<int> stack;
    for (int i = 1; i <= static_cast<int>(text.size()); ++i) {
        const char c = text[i - 1];
        if (c == '(') {
            stack.push_back(i);
        } else if (c == ')') {
            if (stack.empty())
                throw UnbalancedBrackets("unmatched ')' at position " + std::to_string(i));
            const int j = stack.back();
            stack.pop_back();
            if (i - j - 1 < opts.min_hairpin)
                throw HairpinTooSmall("pair (" + std::to_string(j) + "," + std::to_string(i) +
                                      ") encloses fewer than " + std::to_string(opts.min_hairpin) +
                                      " bases");
            y.partner_[j - 1] = i;
            y.partner_[i - 1] = j;
            y.pairs_.emplace_back(j, i);
        } else if (c != '.') {
            throw IllegalCharacter("illegal character '" + std::string(1, c) + "' at position " +
                                   std::to_string(i));
        }
    }
    if (!stack.empty())
        throw UnbalancedBrackets("unmatched '(' at position " + std::to_string(stack.back()));
    std::sort(y.pairs_.begin(), y.pairs_.end());
    if (!opts.allow_lonely) {
        for (auto [i, j] : y.pairs_) {
            const bool inner = i + 1 < j && y.partner(i + 1) == j - 1;
            const bool outer = i > 1 && j < y.length() && y.partner(i - 1) == j + 1;
            if (!inner && !outer)
                throw LonelyPair("isolated pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
    return y;
}

inline std::string render(const Structure& y) { return y.dotbracket(); }

}  // namespace pbound
