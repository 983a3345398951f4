#pragma once

// Ensemble approximation with rival structures (motifs). A rival set over a
// common folding domain approximates the full Boltzmann ensemble; the gap
// between the rivals' collective weight and the target, maximized over the
// differential positions, gives a rigorous upper bound on the target's
// equilibrium probability:
//
//   pbound = 1 / (1 + exp(-max_x ddG(x, Y_r, y*) / RT))
//
// where ddG(x, Y_r, y*) = -RT ln sum_r exp(-ddG(x, y_r, y*) / RT). A rival
// made non-canonical by an assignment contributes zero weight, which only
// loosens the denominator and keeps the bound sound.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pbound/common.hpp"
#include "pbound/domain.hpp"
#include "pbound/energy_model.hpp"
#include "pbound/fold.hpp"
#include "pbound/loops.hpp"
#include "pbound/motif.hpp"
#include "pbound/record.hpp"
#include "pbound/sequence.hpp"
#include "pbound/structure.hpp"

namespace pbound {

// ---------------------------------------------------------------------------
// Differential positions
// ---------------------------------------------------------------------------

struct LoopDiff {
    std::vector<Loop> target_only;
    std::vector<Loop> rival_only;
    std::vector<int> positions;  // union of critical positions of differing loops
};

inline LoopDiff loop_diff(std::vector<Loop> target_loops, std::vector<Loop> rival_loops) {
    std::sort(target_loops.begin(), target_loops.end());
    std::sort(rival_loops.begin(), rival_loops.end());
    LoopDiff out;
    std::set_difference(target_loops.begin(), target_loops.end(), rival_loops.begin(),
                        rival_loops.end(), std::back_inserter(out.target_only));
    std::set_difference(rival_loops.begin(), rival_loops.end(), target_loops.begin(),
                        target_loops.end(), std::back_inserter(out.rival_only));
    std::set<int> pos;
    for (const Loop& z : out.target_only)
        for (int p : critical_positions(z).all()) pos.insert(p);
    for (const Loop& z : out.rival_only)
        for (int p : critical_positions(z).all()) pos.insert(p);
    out.positions.assign(pos.begin(), pos.end());
    return out;
}

inline LoopDiff loop_diff_domain(const Domain& d, const Structure& y_rival,
                                 const Structure& y_target) {
    return loop_diff(domain_loops(d, y_target), domain_loops(d, y_rival));
}

// Positions whose nucleotides can change the energy gap between a rival and
// the target: critical positions of loops in the symmetric difference of
// their loop multisets.
inline std::vector<int> differential_positions(const Structure& y_rival, const Structure& y_target) {
    if (y_rival.length() != y_target.length())
        throw LengthMismatch("structures differ in length");
    return loop_diff(decompose_loops(y_target), decompose_loops(y_rival)).positions;
}

// ---------------------------------------------------------------------------
// Energy gaps
// ---------------------------------------------------------------------------

// ddG(x, y_r, y_t) over the differing loops only; +INF when the rival is not
// in the assignment's ensemble.
inline Energy ddg_diff(const EnergyModel& em, const PartialSequence& x, const LoopDiff& diff) {
    Energy rival = Energy::zero();
    for (const Loop& z : diff.rival_only) {
        rival += loop_energy_or_inf(em, z, x);
        if (rival.is_inf()) return Energy::inf();
    }
    Energy target = Energy::zero();
    for (const Loop& z : diff.target_only) target += loop_energy(em, z, x);
    return rival - target;
}

inline Energy ddg(const EnergyModel& em, const PartialSequence& x, const Structure& y_rival,
                  const Structure& y_target) {
    if (y_rival.length() != y_target.length())
        throw LengthMismatch("structures differ in length");
    return ddg_diff(em, x, loop_diff(decompose_loops(y_target), decompose_loops(y_rival)));
}

// ---------------------------------------------------------------------------
// Rival sets
// ---------------------------------------------------------------------------

struct RivalProvenance {
    uint64_t draw = 0;           // which sample produced the rival
    std::string source_sequence;  // the assignment that folded into it
};

struct RivalSet {
    Domain domain;             // common folding domain (whole sequence for structures)
    Structure target;          // domain coordinates
    std::vector<Structure> rivals;
    std::vector<RivalProvenance> provenance;
    std::vector<int> delta;    // overall differential positions (domain coordinates)
    uint64_t seed = 0;

    // prepared per-rival differential evaluation
    std::vector<LoopDiff> diffs;

    void rebuild_diffs() {
        diffs.clear();
        std::set<int> pos;
        const auto target_loops = domain_loops(domain, target);
        for (const Structure& r : rivals) {
            diffs.push_back(loop_diff(target_loops, domain_loops(domain, r)));
            for (int p : diffs.back().positions) pos.insert(p);
        }
        delta.assign(pos.begin(), pos.end());
    }
};

inline RivalSet make_rival_set(Domain d, Structure target, std::vector<Structure> rivals,
                               uint64_t seed = 0) {
    RivalSet rs;
    rs.domain = std::move(d);
    rs.target = std::move(target);
    rs.seed = seed;
    for (auto& r : rivals) {
        if (r == rs.target) continue;
        if (std::find(rs.rivals.begin(), rs.rivals.end(), r) == rs.rivals.end()) {
            rs.rivals.push_back(std::move(r));
            rs.provenance.push_back({});
        }
    }
    rs.rebuild_diffs();
    return rs;
}

inline RivalSet make_rival_set(const Structure& target, const std::vector<Structure>& rivals,
                               uint64_t seed = 0) {
    return make_rival_set(Domain::whole(target.length()), target, rivals, seed);
}

// Collective gap of a rival set under one assignment, as a real value in
// deci-kcal/mol:  -RT ln sum_r exp(-ddg_r / RT). Equals the single rival's
// integer gap exactly for singleton sets; +inf when no rival is compatible.
inline double ddg_multi(const EnergyModel& em, const PartialSequence& x, const RivalSet& rs) {
    if (rs.rivals.empty()) throw EmptyRivalSet("rival set is empty");
    const double beta = em.beta();
    Energy dmin = Energy::inf();
    std::vector<Energy> gaps;
    gaps.reserve(rs.diffs.size());
    for (const LoopDiff& diff : rs.diffs) {
        const Energy g = ddg_diff(em, x, diff);
        gaps.push_back(g);
        if (g < dmin) dmin = g;
    }
    if (dmin.is_inf()) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (Energy g : gaps)
        if (!g.is_inf()) sum += std::exp(-beta * (g - dmin).deci());
    return dmin.deci() - std::log(sum) / beta;
}

// ---------------------------------------------------------------------------
// Rival sampling
// ---------------------------------------------------------------------------

// Draws compatible assignments (pairs uniform over the six canonical types,
// unpaired uniform over the four nucleotides), folds each under the domain's
// clamps, and keeps distinct non-target results in discovery order.
inline RivalSet sample_rivals_domain(const EnergyModel& em, const Domain& d,
                                     const Structure& target, int n, uint64_t seed,
                                     int min_hairpin = kDefaultMinHairpin) {
    if (n < 1) throw Error("sample count must be positive");
    RivalSet rs;
    rs.domain = d;
    rs.target = target;
    rs.seed = seed;
    Rng rng(seed);
    const AssignmentSpace space(d.size(), target.pairs(), target.unpaired());
    std::set<std::string> seen;
    for (int k = 0; k < n; ++k) {
        const PartialSequence x = space.sample(rng);
        const FoldResult fr = fold_domain(em, domain_nucs(d, x), d, min_hairpin);
        if (fr.structure == target) continue;
        if (!seen.insert(fr.structure.dotbracket()).second) continue;
        rs.rivals.push_back(fr.structure);
        rs.provenance.push_back({static_cast<uint64_t>(k), x.to_string()});
    }
    if (rs.rivals.empty()) throw NoRivalsFound("all sampled folds returned the target");
    rs.rebuild_diffs();
    return rs;
}

inline RivalSet sample_rivals(const EnergyModel& em, const Structure& target, int n, uint64_t seed,
                              int min_hairpin = kDefaultMinHairpin) {
    return sample_rivals_domain(em, Domain::whole(target.length()), target, n, seed, min_hairpin);
}

inline RivalSet sample_rivals(const EnergyModel& em, const Motif& m, int n, uint64_t seed,
                              int min_hairpin = kDefaultMinHairpin) {
    const Domain d = motif_domain(m);
    return sample_rivals_domain(em, d, motif_domain_structure(m, d), n, seed, min_hairpin);
}

// ---------------------------------------------------------------------------
// The bound
// ---------------------------------------------------------------------------

// Assignment slots over the differential positions, classified by the
// target's pairing. Differential positions always contain base pairs whole.
inline AssignmentSpace delta_space(const RivalSet& rs) {
    std::vector<std::pair<int, int>> pair_slots;
    std::vector<int> free_slots;
    for (int p : rs.delta) {
        const int q = rs.target.partner(p);
        if (q == 0)
            free_slots.push_back(p);
        else if (q > p)
            pair_slots.emplace_back(p, q);
        else if (!std::binary_search(rs.delta.begin(), rs.delta.end(), q))
            throw Error("differential positions split a target pair");
    }
    return AssignmentSpace(rs.domain.size(), pair_slots, free_slots);
}

inline uint64_t assignment_space_size(const Structure& target, const std::vector<int>& positions,
                                      int domain_size) {
    std::vector<std::pair<int, int>> pair_slots;
    std::vector<int> free_slots;
    for (int p : positions) {
        const int q = target.partner(p);
        if (q == 0)
            free_slots.push_back(p);
        else if (q > p)
            pair_slots.emplace_back(p, q);
    }
    return AssignmentSpace(domain_size, pair_slots, free_slots).size();
}

// Keeps the rivals whose combined differential space fits the assignment
// budget, trying individually cheaper rivals first (ties by discovery
// order). More rivals only tighten the bound, so every affordable one is
// kept. The result may be empty.
inline RivalSet select_rivals_within_budget(const RivalSet& rs, uint64_t cap) {
    std::vector<std::pair<uint64_t, size_t>> order;
    for (size_t i = 0; i < rs.rivals.size(); ++i)
        order.emplace_back(assignment_space_size(rs.target, rs.diffs[i].positions,
                                                 rs.domain.size()),
                           i);
    std::sort(order.begin(), order.end());
    RivalSet out;
    out.domain = rs.domain;
    out.target = rs.target;
    out.seed = rs.seed;
    std::set<int> pos;
    for (auto [sz, i] : order) {
        std::set<int> trial = pos;
        trial.insert(rs.diffs[i].positions.begin(), rs.diffs[i].positions.end());
        const std::vector<int> trial_v(trial.begin(), trial.end());
        if (assignment_space_size(rs.target, trial_v, rs.domain.size()) > cap) continue;
        pos = std::move(trial);
        out.rivals.push_back(rs.rivals[i]);
        out.provenance.push_back(rs.provenance[i]);
    }
    if (!out.rivals.empty()) out.rebuild_diffs();
    return out;
}

// Ensemble approximation over a rival set: maximizes the collective gap over
// all assignments of the differential positions. Also reports the uMFE
// verdict: if under every assignment some rival ties or beats the target,
// no sequence can make the target a unique MFE.
inline PBoundRecord approx_pbound(const EnergyModel& em, const RivalSet& rs,
                                  uint64_t cap = kDefaultAssignmentCap, bool explain = false) {
    if (rs.rivals.empty()) throw EmptyRivalSet("rival set is empty");
    PBoundRecord rec;
    rec.rival_count = static_cast<int>(rs.rivals.size());
    const AssignmentSpace space = delta_space(rs);
    const uint64_t total = space.size();
    if (total > cap) {
        rec.method = BoundMethod::Skipped;
        rec.pbound = 1.0;
        return rec;
    }

    const double beta = em.beta();
    double best = -std::numeric_limits<double>::infinity();
    uint64_t best_idx = 0;
    bool rival_always_ties = true;  // every assignment leaves some rival with gap <= 0

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        double loc_best = -std::numeric_limits<double>::infinity();
        uint64_t loc_idx = 0;
        bool loc_ties = true;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (int64_t idx = 0; idx < static_cast<int64_t>(total); ++idx) {
            PartialSequence x(rs.domain.size());
            space.write(static_cast<uint64_t>(idx), x);
            Energy dmin = Energy::inf();
            double sum = 0.0;
            std::vector<Energy> gaps(rs.diffs.size());
            for (size_t r = 0; r < rs.diffs.size(); ++r) {
                gaps[r] = ddg_diff(em, x, rs.diffs[r]);
                if (gaps[r] < dmin) dmin = gaps[r];
            }
            double val;
            if (dmin.is_inf()) {
                val = std::numeric_limits<double>::infinity();
            } else {
                for (Energy g : gaps)
                    if (!g.is_inf()) sum += std::exp(-beta * (g - dmin).deci());
                val = dmin.deci() - std::log(sum) / beta;
            }
            if (val > loc_best || (val == loc_best && static_cast<uint64_t>(idx) < loc_idx)) {
                loc_best = val;
                loc_idx = static_cast<uint64_t>(idx);
            }
            if (!(dmin <= Energy::zero())) loc_ties = false;
        }
#ifdef _OPENMP
#pragma omp critical
#endif
        {
            if (loc_best > best || (loc_best == best && loc_idx < best_idx)) {
                best = loc_best;
                best_idx = loc_idx;
            }
            rival_always_ties = rival_always_ties && loc_ties;
        }
    }

    rec.method = BoundMethod::Approx;
    rec.ddg_max = best;
    rec.pbound = 1.0 / (1.0 + std::exp(-best * beta));
    rec.umfe_undesignable = rival_always_ties;
    PartialSequence wit(rs.domain.size());
    space.write(best_idx, wit);
    rec.witness = wit.to_string();
    if (explain) {
        rec.witness_ddg.clear();
        for (const LoopDiff& diff : rs.diffs) {
            const Energy g = ddg_diff(em, wit, diff);
            rec.witness_ddg.push_back(g.is_inf() ? std::numeric_limits<double>::infinity()
                                                 : static_cast<double>(g.deci()));
        }
    }
    return rec;
}

}  // namespace pbound
