#pragma once

// Folding domains. A domain is a renumbered, possibly gapped window of
// sequence positions together with clamped pairs. Constrained motif folding
// collapses each excluded region under a clamped boundary pair, which leaves
// the pair as an adjacent "opaque" brick: it must form, separates no energy
// of its own, and the loop below it is not part of the ensemble.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "pbound/common.hpp"
#include "pbound/loops.hpp"
#include "pbound/sequence.hpp"
#include "pbound/structure.hpp"

namespace pbound {

class Domain {
  public:
    Domain() = default;

    static Domain whole(int n) {
        Domain d;
        d.orig_.resize(n);
        for (int i = 0; i < n; ++i) d.orig_[i] = i + 1;
        d.partner_.assign(n, 0);
        return d;
    }

    int size() const { return static_cast<int>(orig_.size()); }
    bool closed() const { return closed_; }
    int to_orig(int t) const { return orig_[t - 1]; }
    const std::vector<int>& positions() const { return orig_; }

    // 0 when unconstrained, otherwise the renumbered forced partner.
    int forced_partner(int t) const { return partner_[t - 1]; }

    const std::vector<std::pair<int, int>>& forced_pairs() const { return forced_; }

    bool is_opaque(int i, int j) const {
        return std::binary_search(opaque_.begin(), opaque_.end(), std::make_pair(i, j));
    }

    bool has_opaque() const { return !opaque_.empty(); }

    void add_position(int orig) { orig_.push_back(orig); }

    void force_pair(int i, int j, bool opaque) {
        forced_.emplace_back(i, j);
        if (opaque) opaque_.emplace_back(i, j);
    }

    void set_closed(bool c) { closed_ = c; }

    void finalize() {
        partner_.assign(size(), 0);
        std::sort(forced_.begin(), forced_.end());
        std::sort(opaque_.begin(), opaque_.end());
        for (auto [i, j] : forced_) {
            if (i < 1 || j > size() || i >= j) throw InfeasibleConstraints("forced pair out of range");
            if (partner_[i - 1] || partner_[j - 1])
                throw InfeasibleConstraints("conflicting forced pairs");
            partner_[i - 1] = j;
            partner_[j - 1] = i;
        }
        // nesting check
        std::vector<int> stack;
        for (int t = 1; t <= size(); ++t) {
            const int p = partner_[t - 1];
            if (p > t) {
                stack.push_back(p);
            } else if (p != 0) {
                if (stack.empty() || stack.back() != t)
                    throw InfeasibleConstraints("forced pairs are not nested");
                stack.pop_back();
            }
        }
        if (closed_ && !(size() >= 2 && partner_[0] == size()))
            throw Error("closed domain requires the outermost pair to be clamped");
    }

  private:
    std::vector<int> orig_;
    std::vector<int> partner_;
    std::vector<std::pair<int, int>> forced_;
    std::vector<std::pair<int, int>> opaque_;
    bool closed_ = false;
};

// Nucleotides over domain positions, 0-indexed by renumbered position - 1.
inline std::vector<Nuc> domain_nucs(const Domain& d, const PartialSequence& x) {
    std::vector<Nuc> s;
    s.reserve(d.size());
    for (int t = 1; t <= d.size(); ++t) s.push_back(x.at(d.to_orig(t)));
    return s;
}

// Loop decomposition of a (renumbered) pairing over a domain.
inline std::vector<Loop> domain_loops(const Domain& d, const Structure& y) {
    if (y.length() != d.size()) throw LengthMismatch("pairing does not match domain size");
    return decompose_loops_generic(
        d.size(), [&](int t) { return y.partner(t); },
        [&](int i, int j) { return d.is_opaque(i, j); }, d.closed());
}

}  // namespace pbound
