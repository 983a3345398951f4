#pragma once

// Optimal decomposition search. A decomposition partitions the loop tree into
// motifs by choosing split boundary pairs; the structure's probability bound
// is the product of the motif bounds. The memoized top-down recurrence
//
//   best(tau_eta) = min over candidates m at eta of
//                   pbound(m) * prod over loop nodes below m of best(tau_child)
//
// solves each subtree once, so the bound function runs at most (nodes x
// candidates-per-node) times. Hairpin leaves are the base case with value 1;
// leaving them uncovered only loosens the product, which keeps the bound
// sound. The same recurrence with (+, x) counts the decompositions explored.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pbound/cache.hpp"
#include "pbound/common.hpp"
#include "pbound/energy_model.hpp"
#include "pbound/exact_bound.hpp"
#include "pbound/loops.hpp"
#include "pbound/motif.hpp"
#include "pbound/record.hpp"
#include "pbound/rivals.hpp"
#include "pbound/structure.hpp"

namespace pbound {

using BigInt = boost::multiprecision::cpp_int;

struct DecompConfig {
    int max_depth = 5;
    int max_width = 3;
    int max_loop = 8;
    int exact_len_cap = kDefaultExactLenCap;
    bool eval_leaf_hairpins = false;

    void validate() const {
        if (max_depth < 1 || max_width < 1 || max_loop < 1 || exact_len_cap < 1)
            throw ConfigError("decomposition limits must be positive");
    }
};

using BoundFn = std::function<PBoundRecord(const Motif&)>;

// ---------------------------------------------------------------------------
// Candidate generation
// ---------------------------------------------------------------------------

namespace detail {

struct SubtreeSet {
    std::vector<int> nodes;   // sorted
    std::vector<int> levels;  // nodes per relative depth, levels[0] = 1
};

// All connected subtrees rooted at `node` within the depth/width/size limits.
// Each child is either absent or contributes one of its own rooted subtrees,
// so every node set appears exactly once.
inline std::vector<SubtreeSet> rooted_subtrees(const LoopTree& tree, int node, int depth_left,
                                               const DecompConfig& cfg) {
    SubtreeSet base{{node}, {1}};
    if (depth_left == 1 || tree.children(node).empty()) return {base};
    std::vector<SubtreeSet> partials{base};
    for (int child : tree.children(node)) {
        const auto subs = rooted_subtrees(tree, child, depth_left - 1, cfg);
        std::vector<SubtreeSet> next = partials;  // child absent
        for (const SubtreeSet& p : partials) {
            for (const SubtreeSet& s : subs) {
                if (static_cast<int>(p.nodes.size() + s.nodes.size()) > cfg.max_loop) continue;
                SubtreeSet merged;
                merged.levels = p.levels;
                if (merged.levels.size() < s.levels.size() + 1)
                    merged.levels.resize(s.levels.size() + 1, 0);
                bool ok = true;
                for (size_t d = 0; d < s.levels.size(); ++d) {
                    merged.levels[d + 1] += s.levels[d];
                    if (merged.levels[d + 1] > cfg.max_width) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                merged.nodes.resize(p.nodes.size() + s.nodes.size());
                std::merge(p.nodes.begin(), p.nodes.end(), s.nodes.begin(), s.nodes.end(),
                           merged.nodes.begin());
                next.push_back(std::move(merged));
            }
        }
        partials = std::move(next);
    }
    return partials;
}

}  // namespace detail

// Candidate motifs containing the loop node eta: every connected subtree
// rooted there under the configured limits, the single node always included.
// Candidates are ordered by (loop count, canonical key, node ids) so that
// tie-breaking is deterministic.
inline std::vector<Motif> motif_gen(std::shared_ptr<const LoopTree> tree, int node,
                                    const DecompConfig& cfg) {
    cfg.validate();
    std::vector<Motif> out;
    for (const auto& st : detail::rooted_subtrees(*tree, node, cfg.max_depth, cfg))
        out.push_back(motif_from_nodes(tree, st.nodes));
    std::vector<std::string> keys(out.size());
    for (size_t i = 0; i < out.size(); ++i) keys[i] = canonical_motif_key(out[i]);
    std::vector<size_t> order(out.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (out[a].card() != out[b].card()) return out[a].card() < out[b].card();
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return out[a].node_ids() < out[b].node_ids();
    });
    std::vector<Motif> sorted;
    sorted.reserve(out.size());
    for (size_t i : order) sorted.push_back(std::move(out[i]));
    return sorted;
}

// ---------------------------------------------------------------------------
// Counting (exact, arbitrary precision)
// ---------------------------------------------------------------------------

namespace detail {

inline BigInt count_rec(const std::shared_ptr<const LoopTree>& tree, int node,
                        const DecompConfig& cfg, std::map<int, BigInt>& memo) {
    if (tree->loop(node).kind() == LoopKind::Hairpin) return 1;
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    BigInt total = 0;
    for (const Motif& m : motif_gen(tree, node, cfg)) {
        BigInt prod = 1;
        for (int u : m.node_ids())
            for (int c : tree->children(u))
                if (!m.contains(c)) prod *= count_rec(tree, c, cfg, memo);
        total += prod;
    }
    memo[node] = total;
    return total;
}

}  // namespace detail

inline BigInt count_decompositions(std::shared_ptr<const LoopTree> tree, int node,
                                   const DecompConfig& cfg) {
    std::map<int, BigInt> memo;
    return detail::count_rec(tree, node, cfg, memo);
}

// ---------------------------------------------------------------------------
// Decomposition DP
// ---------------------------------------------------------------------------

struct DecompResult {
    double best = 1.0;
    std::vector<std::pair<Motif, PBoundRecord>> motifs;  // chosen, pre-order
    BigInt count_explored = 0;
    std::vector<int> backpointers;  // per node: index into motif_gen order, -1 = base case
    uint64_t bound_calls = 0;       // bound_fn invocations (cache misses)
    std::shared_ptr<const LoopTree> tree;
};

namespace detail {

struct DecompState {
    std::shared_ptr<const LoopTree> tree;
    const DecompConfig* cfg;
    BoundCache* cache;  // may be null
    const BoundFn* bound_fn;
    std::string hash;
    std::vector<double> best;
    std::vector<int> choice;
    std::vector<char> done;
    std::vector<std::vector<Motif>> cands;
    std::vector<std::vector<PBoundRecord>> recs;
    uint64_t bound_calls = 0;
};

inline PBoundRecord resolve_bound(DecompState& st, const Motif& m) {
    const std::string key = canonical_motif_key(m);
    if (st.cache) {
        if (auto hit = st.cache->get(key, st.hash)) return *hit;
    }
    PBoundRecord rec = (*st.bound_fn)(m);
    rec.key = key;
    rec.params_hash = st.hash;
    ++st.bound_calls;
    if (st.cache) st.cache->put(rec);
    return rec;
}

inline double decompose_rec(DecompState& st, int node) {
    const LoopTree& tree = *st.tree;
    if (st.done[node]) return st.best[node];
    if (tree.loop(node).kind() == LoopKind::Hairpin && !st.cfg->eval_leaf_hairpins) {
        st.done[node] = 1;
        st.best[node] = 1.0;
        st.choice[node] = -1;
        return 1.0;
    }
    auto cands = motif_gen(st.tree, node, *st.cfg);
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    std::vector<PBoundRecord> recs;
    recs.reserve(cands.size());
    for (size_t c = 0; c < cands.size(); ++c) {
        const Motif& m = cands[c];
        PBoundRecord rec = resolve_bound(st, m);
        recs.push_back(rec);
        double product = rec.pbound;
        for (int u : m.node_ids())
            for (int ch : tree.children(u))
                if (!m.contains(ch)) product *= decompose_rec(st, ch);
        if (product < best) {
            best = product;
            best_idx = static_cast<int>(c);
        }
    }
    st.done[node] = 1;
    st.best[node] = best;
    st.choice[node] = best_idx;
    st.cands[node] = std::move(cands);
    st.recs[node] = std::move(recs);
    return best;
}

inline void collect_chosen(const DecompState& st, int node,
                           std::vector<std::pair<Motif, PBoundRecord>>& out) {
    const int c = st.choice[node];
    if (c < 0) return;  // uncovered hairpin leaf
    const Motif& m = st.cands[node][c];
    out.emplace_back(m, st.recs[node][c]);
    for (int u : m.node_ids())
        for (int ch : st.tree->children(u))
            if (!m.contains(ch)) collect_chosen(st, ch, out);
}

}  // namespace detail

inline DecompResult decompose(std::shared_ptr<const LoopTree> tree, int node,
                              const DecompConfig& cfg, BoundCache* cache, const BoundFn& bound_fn,
                              const std::string& hash = "") {
    cfg.validate();
    detail::DecompState st;
    st.tree = tree;
    st.cfg = &cfg;
    st.cache = cache;
    st.bound_fn = &bound_fn;
    st.hash = hash;
    const int n = tree->size();
    st.best.assign(n, 1.0);
    st.choice.assign(n, -1);
    st.done.assign(n, 0);
    st.cands.resize(n);
    st.recs.resize(n);

    DecompResult res;
    res.tree = tree;
    res.best = detail::decompose_rec(st, node);
    res.backpointers = st.choice;
    res.bound_calls = st.bound_calls;
    res.count_explored = count_decompositions(tree, node, cfg);
    detail::collect_chosen(st, node, res.motifs);
    return res;
}

// Chosen motifs in pre-order; their bounds multiply to the optimal value.
inline std::vector<Motif> backtrack(const DecompResult& res) {
    std::vector<Motif> out;
    out.reserve(res.motifs.size());
    for (const auto& [m, rec] : res.motifs) out.push_back(m);
    return out;
}

// ---------------------------------------------------------------------------
// Hybrid bound function and the whole-structure bound
// ---------------------------------------------------------------------------

// Exact enumeration for small motifs, rival-based ensemble approximation for
// larger ones, skip (bound 1) when rivals cannot be sampled or the
// differential space exceeds the assignment cap.
inline BoundFn make_hybrid_bound_fn(const EnergyModel& em, const BoundParams& bp,
                                    bool explain = false) {
    return [&em, bp, explain](const Motif& m) -> PBoundRecord {
        if (m.length() <= bp.exact_len_cap)
            return exact_motif_pbound(em, m, bp.exact_len_cap, bp.min_hairpin);
        const std::string key = canonical_motif_key(m);
        for (int attempt = 0; attempt <= bp.retries; ++attempt) {
            // per-motif seed: independent of traversal order, distinct per retry
            uint64_t seed = fnv1a(key, fnv1a(&bp.seed, sizeof bp.seed));
            seed = fnv1a(&attempt, sizeof attempt, seed);
            try {
                const RivalSet all = sample_rivals(em, m, bp.samples, seed, bp.min_hairpin);
                const RivalSet rs = select_rivals_within_budget(all, bp.max_assignments);
                if (rs.rivals.empty()) continue;
                PBoundRecord rec = approx_pbound(em, rs, bp.max_assignments, explain);
                if (rec.method != BoundMethod::Skipped) return rec;
            } catch (const NoRivalsFound&) {
            }
        }
        PBoundRecord rec;
        rec.method = BoundMethod::Skipped;
        rec.pbound = 1.0;
        return rec;
    };
}

// Tightest bound for a whole structure via decomposition of its loop tree.
inline std::pair<PBoundRecord, DecompResult> structure_pbound(const EnergyModel& em,
                                                              const Structure& y,
                                                              const DecompConfig& cfg,
                                                              const BoundParams& bp,
                                                              BoundCache* cache = nullptr,
                                                              bool explain = false) {
    auto tree = std::make_shared<const LoopTree>(build_loop_tree(y));
    const std::string hash = params_hash(em, bp);
    const BoundFn fn = make_hybrid_bound_fn(em, bp, explain);
    DecompResult res = decompose(tree, tree->root(), cfg, cache, fn, hash);

    PBoundRecord rec;
    rec.key = y.dotbracket();
    rec.pbound = res.best;
    rec.params_hash = hash;
    bool all_exact = !res.motifs.empty();
    for (const auto& [m, r] : res.motifs) {
        if (r.method != BoundMethod::Exact) all_exact = false;
        if (r.umfe_undesignable) rec.umfe_undesignable = true;  // a local verdict is global
        rec.rival_count += r.rival_count;
    }
    rec.method = res.motifs.empty() ? BoundMethod::Skipped
                                    : (all_exact ? BoundMethod::Exact : BoundMethod::Approx);
    return {rec, std::move(res)};
}

}  // namespace pbound
