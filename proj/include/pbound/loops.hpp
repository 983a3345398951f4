#pragma once

// Loop decomposition of secondary structures and the loop tree used by the
// decomposition search. Loops carry the critical positions that determine
// their energy: closing-pair positions plus the adjacent mismatch positions,
// by loop kind.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "pbound/common.hpp"
#include "pbound/structure.hpp"

namespace pbound {

enum class LoopKind : uint8_t { External, Hairpin, Stack, Bulge, Internal, Multi };

inline constexpr std::array<char, 6> kLoopKindChar = {'E', 'H', 'S', 'B', 'I', 'M'};

inline char to_char(LoopKind k) { return kLoopKindChar[static_cast<int>(k)]; }

struct CriticalPositions {
    std::vector<std::pair<int, int>> paired;
    std::vector<int> mismatch;

    std::vector<int> all() const {
        std::vector<int> v;
        for (auto [i, j] : paired) {
            v.push_back(i);
            v.push_back(j);
        }
        v.insert(v.end(), mismatch.begin(), mismatch.end());
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }
};

class Loop {
  public:
    Loop(LoopKind kind, std::vector<std::pair<int, int>> closing, int seq_len, int unpaired)
        : kind_(kind), closing_(std::move(closing)), seq_len_(seq_len), unpaired_(unpaired) {}

    LoopKind kind() const { return kind_; }

    // Ordered closing pairs: the enclosing pair first, then branch pairs in
    // ascending order. External loops list only their top-level branch pairs.
    const std::vector<std::pair<int, int>>& closing_pairs() const { return closing_; }

    // Number of unpaired bases inside the loop.
    int unpaired_count() const { return unpaired_; }

    int seq_len() const { return seq_len_; }

    friend bool operator==(const Loop& a, const Loop& b) {
        return a.kind_ == b.kind_ && a.closing_ == b.closing_;
    }
    friend bool operator<(const Loop& a, const Loop& b) {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
        return a.closing_ < b.closing_;
    }

    std::string describe() const {
        std::string s(1, to_char(kind_));
        s += "<";
        for (size_t k = 0; k < closing_.size(); ++k) {
            if (k) s += ",";
            s += "(" + std::to_string(closing_[k].first) + "," + std::to_string(closing_[k].second) + ")";
        }
        s += ">";
        return s;
    }

  private:
    LoopKind kind_;
    std::vector<std::pair<int, int>> closing_;
    int seq_len_;
    int unpaired_;
};

inline CriticalPositions critical_positions(const Loop& z) {
    CriticalPositions cp;
    cp.paired = z.closing_pairs();
    const int n = z.seq_len();
    switch (z.kind()) {
        case LoopKind::External:
            for (auto [i, j] : cp.paired) {
                if (i - 1 >= 1) cp.mismatch.push_back(i - 1);
                if (j + 1 <= n) cp.mismatch.push_back(j + 1);
            }
            break;
        case LoopKind::Hairpin: {
            auto [i, j] = cp.paired[0];
            cp.mismatch = {i + 1, j - 1};
            break;
        }
        case LoopKind::Stack:
        case LoopKind::Bulge:
            break;
        case LoopKind::Internal: {
            auto [i, j] = cp.paired[0];
            auto [k, l] = cp.paired[1];
            cp.mismatch = {i + 1, j - 1, k - 1, l + 1};
            break;
        }
        case LoopKind::Multi: {
            auto [i, j] = cp.paired[0];
            cp.mismatch = {i + 1, j - 1};
            for (size_t b = 1; b < cp.paired.size(); ++b) {
                cp.mismatch.push_back(cp.paired[b].first - 1);
                cp.mismatch.push_back(cp.paired[b].second + 1);
            }
            break;
        }
    }
    std::sort(cp.mismatch.begin(), cp.mismatch.end());
    return cp;
}

namespace detail {

// Pairs immediately below (lo, hi), i.e. with no pair between them and the
// enclosing region. lo = 0, hi = n + 1 scans the top level.
template <typename PartnerFn>
std::vector<std::pair<int, int>> child_pairs(int lo, int hi, PartnerFn partner) {
    std::vector<std::pair<int, int>> out;
    int k = lo + 1;
    while (k < hi) {
        const int m = partner(k);
        if (m > k) {
            out.emplace_back(k, m);
            k = m + 1;
        } else {
            ++k;
        }
    }
    return out;
}

template <typename PartnerFn, typename OpaqueFn>
void collect_loops(int i, int j, int n, PartnerFn partner, OpaqueFn opaque, std::vector<Loop>& out) {
    if (opaque(i, j)) return;  // boundary brick: the enclosed context is not part of this ensemble
    auto branches = child_pairs(i, j, partner);
    int inside = j - i - 1;
    for (auto [k, m] : branches) inside -= m - k + 1;
    if (branches.empty()) {
        out.emplace_back(LoopKind::Hairpin, std::vector<std::pair<int, int>>{{i, j}}, n, inside);
    } else if (branches.size() == 1) {
        auto [k, m] = branches[0];
        const int n1 = k - i - 1;
        const int n2 = j - m - 1;
        LoopKind kind = (n1 == 0 && n2 == 0)  ? LoopKind::Stack
                        : (n1 == 0 || n2 == 0) ? LoopKind::Bulge
                                               : LoopKind::Internal;
        out.emplace_back(kind, std::vector<std::pair<int, int>>{{i, j}, {k, m}}, n, inside);
    } else {
        std::vector<std::pair<int, int>> closing{{i, j}};
        closing.insert(closing.end(), branches.begin(), branches.end());
        out.emplace_back(LoopKind::Multi, std::move(closing), n, inside);
    }
    for (auto [k, m] : branches) collect_loops(k, m, n, partner, opaque, out);
}

}  // namespace detail

// Decomposes a pairing over positions 1..n into loops. `opaque(i, j)` marks
// clamped boundary pairs whose interior belongs to an excluded context and
// closes no loop here; `closed` suppresses the external loop for domains
// enclosed by a clamped outermost pair.
template <typename PartnerFn, typename OpaqueFn>
std::vector<Loop> decompose_loops_generic(int n, PartnerFn partner, OpaqueFn opaque, bool closed) {
    std::vector<Loop> loops;
    auto top = detail::child_pairs(0, n + 1, partner);
    if (closed) {
        if (top.size() != 1 || top[0] != std::make_pair(1, n))
            throw Error("closed domain must be enclosed by the pair (1,n)");
        detail::collect_loops(1, n, n, partner, opaque, loops);
        return loops;
    }
    int outside = n;
    for (auto [k, m] : top) outside -= m - k + 1;
    loops.emplace_back(LoopKind::External, top, n, outside);
    for (auto [k, m] : top) detail::collect_loops(k, m, n, partner, opaque, loops);
    return loops;
}

inline std::vector<Loop> decompose_loops(const Structure& y) {
    return decompose_loops_generic(
        y.length(), [&](int i) { return y.partner(i); }, [](int, int) { return false; }, false);
}

// ---------------------------------------------------------------------------
// Loop tree
// ---------------------------------------------------------------------------

// Rooted tree with one node per loop; the external loop is the root and the
// leaves are exactly the hairpins. Parent and child share a closing pair.
class LoopTree {
  public:
    explicit LoopTree(Structure y) : structure_(std::move(y)) {
        const int n = structure_.length();
        nodes_.push_back(make_external());
        parent_.push_back(-1);
        children_.emplace_back();
        node_of_open_.assign(n + 2, -1);
        build(0, nodes_[0].closing_pairs());
        (void)n;
    }

    const Structure& structure() const { return structure_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int root() const { return 0; }
    const Loop& loop(int id) const { return nodes_[id]; }
    int parent(int id) const { return parent_[id]; }
    const std::vector<int>& children(int id) const { return children_[id]; }

    // Node whose enclosing pair opens at position i (-1 if none).
    int node_of_pair(int i) const { return node_of_open_[i]; }

    // The pair shared between a non-root node and its parent.
    std::pair<int, int> outer_pair(int id) const { return nodes_[id].closing_pairs()[0]; }

    std::vector<int> hairpin_leaves() const {
        std::vector<int> v;
        for (int id = 0; id < size(); ++id)
            if (nodes_[id].kind() == LoopKind::Hairpin) v.push_back(id);
        return v;
    }

  private:
    Loop make_external() {
        auto loops = decompose_loops(structure_);
        return loops[0];
    }

    void build(int id, const std::vector<std::pair<int, int>>& branches) {
        const auto& y = structure_;
        for (auto [i, j] : branches) {
            auto sub = detail::child_pairs(i, j, [&](int k) { return y.partner(k); });
            int inside = j - i - 1;
            for (auto [k, m] : sub) inside -= m - k + 1;
            LoopKind kind;
            std::vector<std::pair<int, int>> closing{{i, j}};
            if (sub.empty()) {
                kind = LoopKind::Hairpin;
            } else if (sub.size() == 1) {
                const int n1 = sub[0].first - i - 1;
                const int n2 = j - sub[0].second - 1;
                kind = (n1 == 0 && n2 == 0)  ? LoopKind::Stack
                       : (n1 == 0 || n2 == 0) ? LoopKind::Bulge
                                              : LoopKind::Internal;
                closing.push_back(sub[0]);
            } else {
                kind = LoopKind::Multi;
                closing.insert(closing.end(), sub.begin(), sub.end());
            }
            const int child = static_cast<int>(nodes_.size());
            nodes_.emplace_back(kind, std::move(closing), y.length(), inside);
            parent_.push_back(id);
            children_.emplace_back();
            children_[id].push_back(child);
            node_of_open_[i] = child;
            build(child, sub);
        }
    }

    Structure structure_;
    std::vector<Loop> nodes_;
    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<int> node_of_open_;
};

inline LoopTree build_loop_tree(const Structure& y) { return LoopTree(y); }

}  // namespace pbound
