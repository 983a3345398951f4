#pragma once

// Test-only reference implementations, written independently of the library
// paths they check: a second critical-position computation, a recursive
// ensemble counter, random structure generation, and a brute-force
// decomposition enumerator over split-pair subsets.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pbound/pbound.hpp"

namespace oracle {

using pbound::Structure;

// ---------------------------------------------------------------------------
// Critical positions, recomputed from the bracket string alone.
// Key: loop signature "K:i-j,i-j,...". Value: sorted critical positions.
// ---------------------------------------------------------------------------

inline std::map<std::string, std::set<int>> critical_sets(const Structure& y) {
    const int n = y.length();
    std::map<std::string, std::set<int>> out;

    auto direct_children = [&](int lo, int hi) {
        std::vector<std::pair<int, int>> kids;
        for (int k = lo; k <= hi;) {
            const int p = y.partner(k);
            if (p > k) {
                kids.emplace_back(k, p);
                k = p + 1;
            } else {
                ++k;
            }
        }
        return kids;
    };

    auto sig = [](char kind, const std::vector<std::pair<int, int>>& ps) {
        std::string s(1, kind);
        s += ':';
        for (auto [a, b] : ps) s += std::to_string(a) + "-" + std::to_string(b) + ",";
        return s;
    };

    // external loop
    {
        auto tops = direct_children(1, n);
        std::set<int> crit;
        for (auto [i, j] : tops) {
            crit.insert(i);
            crit.insert(j);
            if (i > 1) crit.insert(i - 1);
            if (j < n) crit.insert(j + 1);
        }
        out[sig('E', tops)] = crit;
    }

    for (auto [i, j] : y.pairs()) {
        auto kids = direct_children(i + 1, j - 1);
        std::set<int> crit{i, j};
        char kind;
        if (kids.empty()) {
            kind = 'H';
            crit.insert(i + 1);
            crit.insert(j - 1);
        } else if (kids.size() == 1) {
            auto [k, l] = kids[0];
            crit.insert(k);
            crit.insert(l);
            const int left = k - i - 1, right = j - l - 1;
            if (left == 0 && right == 0) {
                kind = 'S';
            } else if (left == 0 || right == 0) {
                kind = 'B';
            } else {
                kind = 'I';
                crit.insert(i + 1);
                crit.insert(j - 1);
                crit.insert(k - 1);
                crit.insert(l + 1);
            }
        } else {
            kind = 'M';
            crit.insert(i + 1);
            crit.insert(j - 1);
            for (auto [k, l] : kids) {
                crit.insert(k);
                crit.insert(l);
                crit.insert(k - 1);
                crit.insert(l + 1);
            }
        }
        std::vector<std::pair<int, int>> ps{{i, j}};
        ps.insert(ps.end(), kids.begin(), kids.end());
        out[sig(kind, ps)] = crit;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Recursive interval counter for the constrained-free ensemble of a sequence.
// ---------------------------------------------------------------------------

inline long long count_structures_rec(const pbound::PartialSequence& x, int lo, int hi,
                                      int min_hairpin,
                                      std::map<std::pair<int, int>, long long>& memo) {
    if (lo >= hi) return 1;
    auto it = memo.find({lo, hi});
    if (it != memo.end()) return it->second;
    long long total = count_structures_rec(x, lo + 1, hi, min_hairpin, memo);
    for (int j = lo + min_hairpin + 1; j <= hi; ++j) {
        if (!pbound::is_canonical(x.at(lo), x.at(j))) continue;
        total += count_structures_rec(x, lo + 1, j - 1, min_hairpin, memo) *
                 count_structures_rec(x, j + 1, hi, min_hairpin, memo);
    }
    memo[{lo, hi}] = total;
    return total;
}

inline long long count_structures(const pbound::PartialSequence& x, int min_hairpin = 3) {
    std::map<std::pair<int, int>, long long> memo;
    return count_structures_rec(x, 1, x.length(), min_hairpin, memo);
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

inline pbound::PartialSequence random_sequence(int n, pbound::Rng& rng) {
    pbound::PartialSequence x(n);
    for (int i = 1; i <= n; ++i) x.set(i, static_cast<pbound::Nuc>(rng.below(4)));
    return x;
}

// Random nested structure with hairpins of at least min_hairpin bases; pair
// density steered by `open_bias` percent.
inline Structure random_structure(int n, pbound::Rng& rng, int min_hairpin = 3,
                                  int open_bias = 35) {
    std::vector<std::pair<int, int>> pairs;
    std::function<void(int, int)> fill = [&](int lo, int hi) {
        int k = lo;
        while (k <= hi) {
            if (hi - k >= min_hairpin + 1 && static_cast<int>(rng.below(100)) < open_bias) {
                const int width =
                    min_hairpin + 2 + static_cast<int>(rng.below(hi - k - min_hairpin));
                const int j = k + std::min(width, hi - k);
                pairs.emplace_back(k, j);
                fill(k + 1, j - 1);
                k = j + 1;
            } else {
                ++k;
            }
        }
    };
    fill(1, n);
    return Structure::from_pairs(n, pairs);
}

inline pbound::PartialSequence random_compatible(const Structure& y, pbound::Rng& rng) {
    pbound::AssignmentSpace sp(y.length(), y.pairs(), y.unpaired());
    return sp.sample(rng);
}

// ---------------------------------------------------------------------------
// Brute-force decomposition enumeration over split-pair subsets
// ---------------------------------------------------------------------------

struct SubsetDecomp {
    // components induced by cutting the chosen pairs; single hairpin nodes
    // are listed separately (they carry no bound factor)
    std::vector<std::vector<int>> scored_components;
    int uncovered_hairpins = 0;
};

// Components of the loop tree after cutting the chosen edges (a pair's edge
// joins the loop it encloses with the loop above). Returns nothing when some
// component violates the limits.
inline bool subset_components(const pbound::LoopTree& tree,
                              const std::vector<std::pair<int, int>>& cut_pairs,
                              const pbound::DecompConfig& cfg, SubsetDecomp& out) {
    std::set<int> cut_nodes;  // nodes whose parent edge is cut
    for (auto [i, j] : cut_pairs) cut_nodes.insert(tree.node_of_pair(i));
    std::vector<int> comp(tree.size(), -1);
    int ncomp = 0;
    for (int id = 0; id < tree.size(); ++id) {
        if (id == tree.root() || cut_nodes.count(id)) comp[id] = ncomp++;
    }
    // propagate down uncut edges (parents precede children by construction)
    for (int id = 0; id < tree.size(); ++id)
        if (comp[id] < 0) comp[id] = comp[tree.parent(id)];
    std::vector<std::vector<int>> groups(ncomp);
    for (int id = 0; id < tree.size(); ++id) groups[comp[id]].push_back(id);

    out.scored_components.clear();
    out.uncovered_hairpins = 0;
    for (auto& g : groups) {
        if (g.size() == 1 && tree.loop(g[0]).kind() == pbound::LoopKind::Hairpin &&
            !cfg.eval_leaf_hairpins) {
            ++out.uncovered_hairpins;
            continue;
        }
        // limits: depth / width / cardinality of the component
        if (static_cast<int>(g.size()) > cfg.max_loop) return false;
        std::map<int, int> depth_of;
        int top = -1;
        std::set<int> gset(g.begin(), g.end());
        for (int id : g)
            if (id == tree.root() || !gset.count(tree.parent(id))) top = id;
        std::function<void(int, int)> walk = [&](int id, int d) {
            depth_of[id] = d;
            for (int c : tree.children(id))
                if (gset.count(c)) walk(c, d + 1);
        };
        walk(top, 1);
        if (static_cast<int>(depth_of.size()) != static_cast<int>(g.size())) return false;
        std::map<int, int> level;
        int maxd = 0;
        for (auto [id, d] : depth_of) {
            ++level[d];
            maxd = std::max(maxd, d);
        }
        if (maxd > cfg.max_depth) return false;
        for (auto [d, c] : level)
            if (c > cfg.max_width) return false;
        out.scored_components.push_back(g);
    }
    return true;
}

// Exhaustive minimum product over all valid split subsets, with the count of
// valid subsets. bound(nodes) supplies the factor of one component.
inline std::pair<double, long long> brute_force_decomposition(
    const pbound::LoopTree& tree, const pbound::DecompConfig& cfg,
    const std::function<double(const std::vector<int>&)>& bound) {
    const auto& pairs = tree.structure().pairs();
    const int k = static_cast<int>(pairs.size());
    double best = std::numeric_limits<double>::infinity();
    long long valid = 0;
    for (long long mask = 0; mask < (1LL << k); ++mask) {
        std::vector<std::pair<int, int>> cut;
        for (int b = 0; b < k; ++b)
            if (mask & (1LL << b)) cut.push_back(pairs[b]);
        SubsetDecomp sd;
        if (!subset_components(tree, cut, cfg, sd)) continue;
        ++valid;
        double prod = 1.0;
        for (const auto& g : sd.scored_components) prod *= bound(g);
        best = std::min(best, prod);
    }
    return {best, valid};
}

// Deterministic pseudo-random bound in (0, 1], keyed by canonical identity so
// that the DP and the brute force score components identically.
inline double synthetic_bound(const std::string& key) {
    const uint64_t h = pbound::fnv1a(key);
    return 0.05 + 0.95 * static_cast<double>(h % 100003) / 100003.0;
}

}  // namespace oracle
