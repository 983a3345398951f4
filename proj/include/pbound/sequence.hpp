#pragma once

// Partial nucleotide assignments and the enumeration space over differential
// positions: paired slots range over the six canonical pair types, free slots
// over the four nucleotides, in odometer order (pairs first, last slot
// fastest).

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pbound/common.hpp"

namespace pbound {

class PartialSequence {
  public:
    PartialSequence() = default;
    explicit PartialSequence(int length) : nt_(length, -1) {}

    static PartialSequence from_string(const std::string& s) {
        PartialSequence x(static_cast<int>(s.size()));
        for (int i = 1; i <= x.length(); ++i)
            if (s[i - 1] != 'N' && s[i - 1] != 'n' && s[i - 1] != '?')
                x.set(i, nuc_from_char(s[i - 1]));
        return x;
    }

    int length() const { return static_cast<int>(nt_.size()); }
    bool assigned(int i) const { return nt_[i - 1] >= 0; }

    Nuc at(int i) const {
        if (!assigned(i)) throw IncompleteAssignment("position " + std::to_string(i) + " unassigned");
        return static_cast<Nuc>(nt_[i - 1]);
    }

    void set(int i, Nuc n) { nt_[i - 1] = static_cast<int8_t>(n); }
    void clear(int i) { nt_[i - 1] = -1; }

    std::vector<int> domain() const {
        std::vector<int> d;
        for (int i = 1; i <= length(); ++i)
            if (assigned(i)) d.push_back(i);
        return d;
    }

    bool fully_assigned() const {
        for (int8_t v : nt_)
            if (v < 0) return false;
        return true;
    }

    std::string to_string() const {
        std::string s(nt_.size(), 'N');
        for (int i = 1; i <= length(); ++i)
            if (assigned(i)) s[i - 1] = to_char(at(i));
        return s;
    }

    friend bool operator==(const PartialSequence& a, const PartialSequence& b) {
        return a.nt_ == b.nt_;
    }

  private:
    std::vector<int8_t> nt_;
};

// Restriction of an assignment to a position subset.
inline PartialSequence project(const PartialSequence& x, const std::vector<int>& positions) {
    PartialSequence out(x.length());
    for (int i : positions) {
        if (i < 1 || i > x.length() || !x.assigned(i))
            throw MissingPosition("position " + std::to_string(i) + " not in assignment domain");
        out.set(i, x.at(i));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assignment enumeration
// ---------------------------------------------------------------------------

class AssignmentSpace {
  public:
    AssignmentSpace(int length, std::vector<std::pair<int, int>> pair_slots, std::vector<int> free_slots)
        : length_(length), pair_slots_(std::move(pair_slots)), free_slots_(std::move(free_slots)) {}

    const std::vector<std::pair<int, int>>& pair_slots() const { return pair_slots_; }
    const std::vector<int>& free_slots() const { return free_slots_; }

    // 6^pairs * 4^free, saturating at 2^64-1.
    uint64_t size() const {
        uint64_t s = 1;
        for (size_t k = 0; k < pair_slots_.size(); ++k) s = sat_mul(s, 6);
        for (size_t k = 0; k < free_slots_.size(); ++k) s = sat_mul(s, 4);
        return s;
    }

    PartialSequence decode(uint64_t idx) const {
        PartialSequence x(length_);
        write(idx, x);
        return x;
    }

    // Overwrites only this space's slots; allows reusing a base assignment.
    void write(uint64_t idx, PartialSequence& x) const {
        for (size_t k = free_slots_.size(); k-- > 0;) {
            x.set(free_slots_[k], static_cast<Nuc>(idx % 4));
            idx /= 4;
        }
        for (size_t k = pair_slots_.size(); k-- > 0;) {
            auto [a, b] = pair_nucs(static_cast<PairType>(idx % 6));
            x.set(pair_slots_[k].first, a);
            x.set(pair_slots_[k].second, b);
            idx /= 6;
        }
    }

    PartialSequence sample(Rng& rng) const {
        PartialSequence x(length_);
        for (auto [i, j] : pair_slots_) {
            auto [a, b] = pair_nucs(static_cast<PairType>(rng.below(6)));
            x.set(i, a);
            x.set(j, b);
        }
        for (int i : free_slots_) x.set(i, static_cast<Nuc>(rng.below(4)));
        return x;
    }

  private:
    static uint64_t sat_mul(uint64_t a, uint64_t b) {
        if (a > std::numeric_limits<uint64_t>::max() / b) return std::numeric_limits<uint64_t>::max();
        return a * b;
    }

    int length_;
    std::vector<std::pair<int, int>> pair_slots_;
    std::vector<int> free_slots_;
};

}  // namespace pbound
