#pragma once

// Motifs: contiguous subsets of a structure's loops. A motif's pairs split
// into internal pairs (shared by two member loops) and boundary pairs (shared
// with the excluded context). Boundary pairs define the constrained folding
// domain of the motif ensemble.

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pbound/common.hpp"
#include "pbound/domain.hpp"
#include "pbound/loops.hpp"
#include "pbound/structure.hpp"

namespace pbound {

class Motif {
  public:
    const std::vector<int>& node_ids() const { return node_ids_; }
    int top_node() const { return top_; }
    const std::vector<std::pair<int, int>>& ipairs() const { return ipairs_; }
    const std::vector<std::pair<int, int>>& bpairs() const { return bpairs_; }
    const std::vector<int>& span_positions() const { return span_; }
    int card() const { return static_cast<int>(node_ids_.size()); }
    int depth() const { return depth_; }
    int width() const { return width_; }

    // Number of bases the motif contains.
    int length() const { return static_cast<int>(span_.size()); }

    const LoopTree& tree() const { return *tree_; }
    std::shared_ptr<const LoopTree> tree_ptr() const { return tree_; }

    bool contains(int node_id) const {
        return std::binary_search(node_ids_.begin(), node_ids_.end(), node_id);
    }

    std::vector<std::pair<int, int>> pairs() const {
        std::vector<std::pair<int, int>> p(ipairs_);
        p.insert(p.end(), bpairs_.begin(), bpairs_.end());
        std::sort(p.begin(), p.end());
        return p;
    }

    std::vector<Loop> loops() const {
        std::vector<Loop> out;
        out.reserve(node_ids_.size());
        for (int id : node_ids_) out.push_back(tree_->loop(id));
        return out;
    }

    friend Motif motif_from_nodes(std::shared_ptr<const LoopTree> tree, const std::vector<int>& ids);

  private:
    std::shared_ptr<const LoopTree> tree_;
    std::vector<int> node_ids_;  // sorted
    int top_ = -1;
    std::vector<std::pair<int, int>> ipairs_, bpairs_;
    std::vector<int> span_;
    int depth_ = 0, width_ = 0;
};

namespace detail {

// Positions belonging to one loop: the closing-pair endpoints plus the
// unpaired bases of the loop region.
inline void mark_loop_region(const LoopTree& tree, int id, std::vector<char>& mark) {
    const Loop& z = tree.loop(id);
    const Structure& y = tree.structure();
    auto cover = [&](int lo, int hi) {
        int k = lo;
        while (k <= hi) {
            mark[k - 1] = 1;
            const int p = y.partner(k);
            if (p > k) {
                mark[p - 1] = 1;
                k = p + 1;  // skip the enclosed region; it belongs to deeper loops
            } else {
                ++k;
            }
        }
    };
    if (z.kind() == LoopKind::External) {
        cover(1, y.length());
    } else {
        auto [i, j] = z.closing_pairs()[0];
        mark[i - 1] = mark[j - 1] = 1;
        cover(i + 1, j - 1);
    }
}

}  // namespace detail

inline Motif motif_from_nodes(std::shared_ptr<const LoopTree> tree, const std::vector<int>& ids) {
    if (ids.empty()) throw Error("motif needs at least one loop");
    Motif m;
    m.tree_ = std::move(tree);
    const LoopTree& t = *m.tree_;
    m.node_ids_ = ids;
    std::sort(m.node_ids_.begin(), m.node_ids_.end());
    m.node_ids_.erase(std::unique(m.node_ids_.begin(), m.node_ids_.end()), m.node_ids_.end());

    auto in_set = [&](int id) { return m.contains(id); };

    // top node: the unique member whose parent is outside
    m.top_ = -1;
    for (int id : m.node_ids_) {
        if (t.parent(id) < 0 || !in_set(t.parent(id))) {
            if (m.top_ >= 0) throw NotContiguous("loop set is not a connected subtree");
            m.top_ = id;
        }
    }
    if (m.top_ < 0) throw NotContiguous("loop set is not a connected subtree");

    // reachability from the top within the set
    std::vector<int> order{m.top_};
    std::vector<int> rel_depth_of(t.size(), -1);
    rel_depth_of[m.top_] = 1;
    size_t head = 0;
    while (head < order.size()) {
        const int u = order[head++];
        for (int c : t.children(u))
            if (in_set(c)) {
                rel_depth_of[c] = rel_depth_of[u] + 1;
                order.push_back(c);
            }
    }
    if (order.size() != m.node_ids_.size()) throw NotContiguous("loop set is not a connected subtree");

    std::vector<int> level_count;
    for (int id : m.node_ids_) {
        const int d = rel_depth_of[id];
        if (static_cast<int>(level_count.size()) < d) level_count.resize(d, 0);
        ++level_count[d - 1];
    }
    m.depth_ = static_cast<int>(level_count.size());
    m.width_ = *std::max_element(level_count.begin(), level_count.end());

    // classify pairs: a pair is shared between the loop it encloses
    // (node_of_pair) and that loop's parent
    std::map<std::pair<int, int>, bool> internal;  // pair -> both sides in set
    for (int id : m.node_ids_) {
        for (auto p : t.loop(id).closing_pairs()) {
            const int below = t.node_of_pair(p.first);
            const int above = t.parent(below);
            const bool both = in_set(below) && above >= 0 && in_set(above);
            internal[p] = both;
        }
    }
    for (auto& [p, both] : internal)
        (both ? m.ipairs_ : m.bpairs_).push_back(p);

    std::vector<char> mark(t.structure().length(), 0);
    for (int id : m.node_ids_) detail::mark_loop_region(t, id, mark);
    for (int i = 1; i <= t.structure().length(); ++i)
        if (mark[i - 1]) m.span_.push_back(i);
    return m;
}

// Whole structure viewed as one motif (every loop; no boundary pairs).
inline Motif whole_structure_motif(std::shared_ptr<const LoopTree> tree) {
    std::vector<int> ids(tree->size());
    for (int i = 0; i < tree->size(); ++i) ids[i] = i;
    return motif_from_nodes(std::move(tree), ids);
}

// A boundary pair whose excluded side lies below it (the enclosed loop is
// outside the motif). The remaining boundary pair, if any, encloses the motif
// from above.
inline bool bpair_faces_down(const Motif& m, std::pair<int, int> bp) {
    const int below = m.tree().node_of_pair(bp.first);
    return !m.contains(below);
}

// Deterministic cache identity: loop-kind counts, then the motif's bracket
// string over renumbered span positions with each excluded region below a
// boundary pair collapsed to '*'. Equal keys identify motifs that are
// position-relabel isomorphic with the same loop geometry.
inline std::string canonical_motif_key(const Motif& m) {
    static constexpr LoopKind kOrder[6] = {LoopKind::External, LoopKind::Stack, LoopKind::Bulge,
                                           LoopKind::Internal, LoopKind::Multi, LoopKind::Hairpin};
    int counts[6] = {0, 0, 0, 0, 0, 0};
    for (int id : m.node_ids())
        for (int k = 0; k < 6; ++k)
            if (m.tree().loop(id).kind() == kOrder[k]) ++counts[k];
    std::string key;
    for (int k = 0; k < 6; ++k)
        if (counts[k]) key += std::string(1, to_char(kOrder[k])) + std::to_string(counts[k]);
    key += ":";

    std::vector<char> open_down(m.tree().structure().length() + 1, 0);
    for (auto bp : m.bpairs())
        if (bpair_faces_down(m, bp)) open_down[bp.first] = 1;

    const Structure& y = m.tree().structure();
    for (int p : m.span_positions()) {
        const int q = y.partner(p);
        if (q == 0)
            key += '.';
        else if (q > p)
            key += open_down[p] ? "(*" : "(";
        else
            key += ')';
    }
    return key;
}

// Constrained folding domain of a motif: span positions renumbered 1..k,
// boundary pairs clamped. Downward boundary pairs become opaque bricks;
// if the top loop is enclosed by a boundary pair the domain is closed.
inline Domain motif_domain(const Motif& m) {
    Domain d;
    std::vector<int> renum(m.tree().structure().length() + 1, 0);
    int t = 0;
    for (int p : m.span_positions()) {
        d.add_position(p);
        renum[p] = ++t;
    }
    for (auto bp : m.bpairs())
        d.force_pair(renum[bp.first], renum[bp.second], /*opaque=*/bpair_faces_down(m, bp));
    d.set_closed(m.top_node() != m.tree().root());
    d.finalize();
    return d;
}

// The motif's own pairing expressed over its domain (the target of rival
// comparisons within the constrained ensemble).
inline Structure motif_domain_structure(const Motif& m, const Domain& d) {
    std::vector<int> renum(m.tree().structure().length() + 1, 0);
    for (int t = 1; t <= d.size(); ++t) renum[d.to_orig(t)] = t;
    std::vector<std::pair<int, int>> pairs;
    for (auto [i, j] : m.pairs()) pairs.emplace_back(renum[i], renum[j]);
    return Structure::from_pairs(d.size(), pairs);
}

}  // namespace pbound
