#pragma once

// Exact probability bounds for small motifs: enumerate every partial sequence
// compatible with the motif's pairs and take the maximum equilibrium
// probability within the boundary-constrained ensemble. As a byproduct the
// sweep decides whether any assignment makes the motif a unique constrained
// MFE, which settles uMFE designability exhaustively.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <string>
#include <vector>

#include "pbound/common.hpp"
#include "pbound/energy_model.hpp"
#include "pbound/fold.hpp"
#include "pbound/motif.hpp"
#include "pbound/record.hpp"
#include "pbound/sequence.hpp"

namespace pbound {

inline constexpr int kDefaultExactLenCap = 14;

inline PBoundRecord exact_motif_pbound(const EnergyModel& em, const Motif& m,
                                       int len_cap = kDefaultExactLenCap,
                                       int min_hairpin = kDefaultMinHairpin) {
    if (m.length() > len_cap)
        throw MotifTooLarge("motif of length " + std::to_string(m.length()) +
                            " exceeds the exact-enumeration cap " + std::to_string(len_cap));
    const Domain d = motif_domain(m);
    const Structure target = motif_domain_structure(m, d);
    const auto target_loops = domain_loops(d, target);
    const double beta = em.beta();

    std::vector<std::pair<int, int>> pair_slots = target.pairs();
    std::vector<int> free_slots = target.unpaired();
    const AssignmentSpace space(d.size(), pair_slots, free_slots);
    const uint64_t total = space.size();

    double best_p = -1.0;
    uint64_t best_idx = 0;
    bool any_umfe = false;

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        double loc_p = -1.0;
        uint64_t loc_idx = 0;
        bool loc_umfe = false;
        std::vector<Nuc> s(d.size());
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (int64_t idx = 0; idx < static_cast<int64_t>(total); ++idx) {
            PartialSequence x(d.size());
            space.write(static_cast<uint64_t>(idx), x);
            for (int t = 1; t <= d.size(); ++t) s[t - 1] = x.at(t);
            detail::FoldDp dp(em, s, d, min_hairpin);
            Energy et = Energy::zero();
            for (const Loop& z : target_loops) et += loop_energy_nucs(em, z, s);
            const double p = std::exp(-beta * et.deci()) / dp.partition();
            if (p > loc_p || (p == loc_p && static_cast<uint64_t>(idx) < loc_idx)) {
                loc_p = p;
                loc_idx = static_cast<uint64_t>(idx);
            }
            if (!loc_umfe) {
                const FoldResult fr = dp.mfe();
                if (fr.unique && fr.structure == target) loc_umfe = true;
            }
        }
#ifdef _OPENMP
#pragma omp critical
#endif
        {
            if (loc_p > best_p || (loc_p == best_p && loc_idx < best_idx)) {
                best_p = loc_p;
                best_idx = loc_idx;
            }
            any_umfe = any_umfe || loc_umfe;
        }
    }

    PBoundRecord rec;
    rec.key = canonical_motif_key(m);
    rec.pbound = best_p;
    rec.method = BoundMethod::Exact;
    rec.rival_count = 0;
    rec.umfe_undesignable = !any_umfe;
    PartialSequence wit(d.size());
    space.write(best_idx, wit);
    rec.witness = wit.to_string();
    return rec;
}

}  // namespace pbound
