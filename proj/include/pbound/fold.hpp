#pragma once

// Folding over a (possibly constrained) domain: exact MFE with co-optimal
// counting, partition function, ensemble enumeration, and equilibrium
// probabilities of structures and motifs.
//
// The inside recursions, over renumbered positions 1..k:
//
//   V(p,q)  = best/total over [p..q] with (p,q) paired:
//               hairpin(p,q)
//             | two-loop(p,q,r,t) + V(r,t)            (stack/bulge/internal)
//             | a + b + au(p,q) + WM2(p+1,q-1)        (multiloop)
//             | 0 if (p,q) is an opaque brick
//   WM(i,j) = multiloop tail with >= 1 branch:
//               WM(i,j-1) + c
//             | prefix(i,r-1) + V(r,j) + b + au(r,j),  prefix = all-unpaired | WM
//   WM2(i,j)= multiloop tail with >= 2 branches:
//               WM2(i,j-1) + c
//             | WM(i,r-1) + V(r,j) + b + au(r,j)
//   W(q)    = external prefix 1..q:
//               W(q-1)   (q unpaired)
//             | W(r-1) + V(r,q) + au(r,q)
//
// Every structure admits exactly one derivation, so the same recursions give
// the partition function under the (+, x) semiring. Positions restricted by
// clamped pairs may neither stay unpaired nor pair elsewhere, which forces
// every counted structure to contain the clamps. Two-loop interiors are
// capped at kMaxTwoLoop unpaired bases, as is conventional.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pbound/common.hpp"
#include "pbound/domain.hpp"
#include "pbound/energy_model.hpp"
#include "pbound/motif.hpp"
#include "pbound/sequence.hpp"
#include "pbound/structure.hpp"

namespace pbound {

inline constexpr int kDefaultMinHairpin = 3;
inline constexpr int kMaxTwoLoop = 30;
inline constexpr int kDefaultEnumCap = 20;

struct FoldConstraints {
    std::vector<std::pair<int, int>> forced_pairs;  // original coordinates, nested
    int region_lo = 1;
    int region_hi = 0;  // 0: whole sequence
};

struct FoldResult {
    Structure structure;  // same coordinate system as the folding domain
    Energy energy;
    uint64_t co_optimal = 0;  // structures achieving the minimum energy (saturating)
    bool unique = false;
};

struct EnsembleSummary {
    double q = 0.0;      // partition value
    double log_q = 0.0;  // always valid, also in linear mode
    Energy mfe;
    Structure mfe_structure;
};

namespace detail {

inline constexpr uint64_t kCountCap = uint64_t(1) << 62;

inline uint64_t sat_add(uint64_t a, uint64_t b) {
    return (a > kCountCap - b) ? kCountCap : a + b;
}
inline uint64_t sat_mul(uint64_t a, uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kCountCap / b) return kCountCap;
    return a * b;
}

struct MfeCell {
    Energy e = Energy::inf();
    int32_t npairs = 0;
    uint64_t count = 0;

    // alternative derivations of the same region: keep the (energy, pairs)
    // lexicographic minimum, accumulate the energy-optimal count
    void merge(Energy oe, int32_t onp, uint64_t ocnt) {
        if (oe.is_inf()) return;
        if (e.is_inf() || oe < e) {
            e = oe;
            npairs = onp;
            count = ocnt;
        } else if (oe == e) {
            count = sat_add(count, ocnt);
            if (onp < npairs) npairs = onp;
        }
    }
};

struct LinearWeight {
    using T = double;
    static T zero() { return 0.0; }
    static T one() { return 1.0; }
    static T add(T a, T b) { return a + b; }
    static T mul(T a, T b) { return a * b; }
    static T from_energy(double beta, Energy e) {
        return e.is_inf() ? 0.0 : std::exp(-beta * e.deci());
    }
};

struct LogWeight {
    using T = double;  // natural log of the weight
    static T zero() { return -std::numeric_limits<double>::infinity(); }
    static T one() { return 0.0; }
    static T add(T a, T b) {
        if (a == zero()) return b;
        if (b == zero()) return a;
        const T m = std::max(a, b);
        return m + std::log1p(std::exp(std::min(a, b) - m));
    }
    static T mul(T a, T b) { return a + b; }
    static T from_energy(double beta, Energy e) { return e.is_inf() ? zero() : -beta * e.deci(); }
};

// One folding problem: sequence + domain + hairpin rule. MFE and partition
// passes share the admissibility predicates and loop-term helpers.
class FoldDp {
  public:
    FoldDp(const EnergyModel& em, std::vector<Nuc> s, const Domain& d, int min_hairpin)
        : em_(em), s_(std::move(s)), d_(d), mh_(min_hairpin), k_(d.size()) {
        if (static_cast<int>(s_.size()) != k_) throw LengthMismatch("sequence/domain size mismatch");
        for (auto [i, j] : d_.forced_pairs())
            if (!is_canonical(at(i), at(j)))
                throw InfeasibleConstraints("forced pair (" + std::to_string(d_.to_orig(i)) + "," +
                                            std::to_string(d_.to_orig(j)) + ") is not canonical");
    }

    FoldResult mfe() {
        compute_mfe();
        MfeCell top = d_.closed() ? v_[vid(1, k_)] : w_[k_];
        FoldResult out;
        if (top.e.is_inf()) throw InfeasibleConstraints("no structure satisfies the constraints");
        out.energy = top.e;
        out.co_optimal = top.count;
        out.unique = top.count == 1;
        std::vector<std::pair<int, int>> pairs;
        if (d_.closed())
            trace_v(1, k_, pairs);
        else
            trace_w(k_, pairs);
        std::sort(pairs.begin(), pairs.end());
        out.structure = Structure::from_pairs(k_, pairs);
        return out;
    }

    // linear-domain partition value
    double partition() { return partition_impl<LinearWeight>(); }
    // log-domain partition value, safe for long inputs
    double log_partition() { return partition_impl<LogWeight>(); }

  private:
    Nuc at(int t) const { return s_[t - 1]; }
    bool free_pos(int t) const { return d_.forced_partner(t) == 0; }

    bool pair_ok(int p, int q) const {
        if (!is_canonical(at(p), at(q))) return false;
        const int fp = d_.forced_partner(p), fq = d_.forced_partner(q);
        return (fp == 0 || fp == q) && (fq == 0 || fq == p);
    }

    PairType type_of(int p, int q) const {
        return static_cast<PairType>(pair_type_index(at(p), at(q)));
    }

    int vid(int p, int q) const { return p * (k_ + 1) + q; }

    // --- MFE pass -----------------------------------------------------

    void compute_mfe() {
        if (mfe_done_) return;
        mfe_done_ = true;
        const int n = k_;
        v_.assign((n + 1) * (n + 1), MfeCell{});
        wm_.assign((n + 1) * (n + 1), MfeCell{});
        wm2_.assign((n + 1) * (n + 1), MfeCell{});
        // free_run_[t]: positions t.. up to the next clamped position are unconstrained
        free_len_.assign(n + 2, 0);
        for (int t = n; t >= 1; --t) free_len_[t] = free_pos(t) ? free_len_[t + 1] + 1 : 0;

        for (int span = 2; span <= n; ++span) {
            for (int p = 1; p + span - 1 <= n; ++p) {
                const int q = p + span - 1;
                compute_v(p, q);
            }
            for (int i = 1; i + span - 1 <= n; ++i) {
                const int j = i + span - 1;
                compute_wm(i, j);
            }
        }
        w_.assign(n + 1, MfeCell{});
        w_[0] = MfeCell{Energy::zero(), 0, 1};
        for (int q = 1; q <= n; ++q) {
            MfeCell& cur = w_[q];
            if (free_pos(q) && w_[q - 1].count)
                cur.merge(w_[q - 1].e, w_[q - 1].npairs, w_[q - 1].count);
            for (int r = 1; r < q; ++r) {
                const MfeCell& head = w_[r - 1];
                const MfeCell& br = v_[vid(r, q)];
                if (!head.count || !br.count) continue;
                cur.merge(head.e + br.e + em_.external_branch_term(type_of(r, q)),
                          head.npairs + br.npairs, sat_mul(head.count, br.count));
            }
        }
    }

    void compute_v(int p, int q) {
        MfeCell& cur = v_[vid(p, q)];
        if (!pair_ok(p, q)) return;
        if (d_.is_opaque(p, q)) {
            cur.merge(Energy::zero(), 1, 1);
            return;
        }
        // hairpin
        if (q - p - 1 >= mh_ && free_len_[p + 1] >= q - p - 1)
            cur.merge(em_.hairpin_term(type_of(p, q), at(p + 1), at(q - 1), q - p - 1), 1, 1);
        // stack / bulge / internal
        const int max_n1 = std::min(kMaxTwoLoop, q - p - 2);
        for (int n1 = 0; n1 <= max_n1; ++n1) {
            const int r = p + 1 + n1;
            if (n1 > 0 && free_len_[p + 1] < n1) break;
            const int max_n2 = std::min(kMaxTwoLoop - n1, q - r - 2);
            for (int n2 = 0; n2 <= max_n2; ++n2) {
                const int t = q - 1 - n2;
                if (t <= r) break;
                if (n2 > 0 && free_len_[t + 1] < n2) break;
                const MfeCell& inner = v_[vid(r, t)];
                if (!inner.count) continue;
                const Energy loop = two_loop(p, q, r, t, n1, n2);
                cur.merge(loop + inner.e, 1 + inner.npairs, inner.count);
            }
        }
        // multiloop
        if (q - p - 1 >= 2) {
            const MfeCell& in = wm2_[vid(p + 1, q - 1)];
            if (in.count)
                cur.merge(em_.multi_closing_term() + em_.multi_pair_term(type_of(p, q)) + in.e,
                          1 + in.npairs, in.count);
        }
    }

    Energy two_loop(int p, int q, int r, int t, int n1, int n2) const {
        if (n1 == 0 && n2 == 0) return em_.stack_term(type_of(p, q), type_of(r, t));
        if (n1 == 0 || n2 == 0) return em_.bulge_term(type_of(p, q), type_of(r, t), n1 + n2);
        return em_.internal_term(type_of(p, q), type_of(t, r), n1, n2, at(p + 1), at(q - 1),
                                 at(t + 1), at(r - 1));
    }

    void compute_wm(int i, int j) {
        MfeCell& m1 = wm_[vid(i, j)];
        MfeCell& m2 = wm2_[vid(i, j)];
        const Energy c1 = em_.multi_unpaired_term(1);
        if (free_pos(j)) {
            const MfeCell& p1 = wm_[vid(i, j - 1)];
            if (j > i && p1.count) m1.merge(p1.e + c1, p1.npairs, p1.count);
            const MfeCell& p2 = wm2_[vid(i, j - 1)];
            if (j > i && p2.count) m2.merge(p2.e + c1, p2.npairs, p2.count);
        }
        for (int r = i; r < j; ++r) {
            const MfeCell& br = v_[vid(r, j)];
            if (!br.count) continue;
            const Energy bterm = br.e + em_.multi_pair_term(type_of(r, j));
            if (r == i) {
                m1.merge(bterm, br.npairs, br.count);
            } else {
                if (free_len_[i] >= r - i)  // all-unpaired prefix
                    m1.merge(em_.multi_unpaired_term(r - i) + bterm, br.npairs, br.count);
                const MfeCell& head = wm_[vid(i, r - 1)];
                if (head.count) {
                    m1.merge(head.e + bterm, head.npairs + br.npairs, sat_mul(head.count, br.count));
                    m2.merge(head.e + bterm, head.npairs + br.npairs, sat_mul(head.count, br.count));
                }
            }
        }
    }

    // --- deterministic traceback ---------------------------------------
    // Option order is fixed (bricks, hairpin, two-loop by ascending side
    // sizes, multiloop; branches by ascending start), so equal-energy ties
    // resolve identically on every run.

    void trace_w(int q, std::vector<std::pair<int, int>>& out) {
        if (q == 0) return;
        const MfeCell& cur = w_[q];
        for (int r = 1; r < q; ++r) {
            const MfeCell& head = w_[r - 1];
            const MfeCell& br = v_[vid(r, q)];
            if (!head.count || !br.count) continue;
            if (head.e + br.e + em_.external_branch_term(type_of(r, q)) == cur.e &&
                head.npairs + br.npairs == cur.npairs) {
                trace_w(r - 1, out);
                out.emplace_back(r, q);
                trace_v(r, q, out);
                return;
            }
        }
        trace_w(q - 1, out);
    }

    void trace_v(int p, int q, std::vector<std::pair<int, int>>& out) {
        const MfeCell& cur = v_[vid(p, q)];
        if (d_.is_opaque(p, q)) return;
        if (q - p - 1 >= mh_ && free_len_[p + 1] >= q - p - 1 &&
            em_.hairpin_term(type_of(p, q), at(p + 1), at(q - 1), q - p - 1) == cur.e &&
            cur.npairs == 1)
            return;
        const int max_n1 = std::min(kMaxTwoLoop, q - p - 2);
        for (int n1 = 0; n1 <= max_n1; ++n1) {
            const int r = p + 1 + n1;
            if (n1 > 0 && free_len_[p + 1] < n1) break;
            const int max_n2 = std::min(kMaxTwoLoop - n1, q - r - 2);
            for (int n2 = 0; n2 <= max_n2; ++n2) {
                const int t = q - 1 - n2;
                if (t <= r) break;
                if (n2 > 0 && free_len_[t + 1] < n2) break;
                const MfeCell& inner = v_[vid(r, t)];
                if (!inner.count) continue;
                if (two_loop(p, q, r, t, n1, n2) + inner.e == cur.e &&
                    1 + inner.npairs == cur.npairs) {
                    out.emplace_back(r, t);
                    trace_v(r, t, out);
                    return;
                }
            }
        }
        trace_wm2(p + 1, q - 1,
                  cur.e - em_.multi_closing_term() - em_.multi_pair_term(type_of(p, q)),
                  cur.npairs - 1, out);
    }

    void trace_wm2(int i, int j, Energy e, int32_t np, std::vector<std::pair<int, int>>& out) {
        for (int r = i + 1; r < j; ++r) {
            const MfeCell& head = wm_[vid(i, r - 1)];
            const MfeCell& br = v_[vid(r, j)];
            if (!head.count || !br.count) continue;
            if (head.e + br.e + em_.multi_pair_term(type_of(r, j)) == e &&
                head.npairs + br.npairs == np) {
                trace_wm(i, r - 1, head.e, head.npairs, out);
                out.emplace_back(r, j);
                trace_v(r, j, out);
                return;
            }
        }
        // j unpaired
        if (!free_pos(j) || j - 1 <= i) throw Error("traceback failed");
        trace_wm2(i, j - 1, e - em_.multi_unpaired_term(1), np, out);
    }

    void trace_wm(int i, int j, Energy e, int32_t np, std::vector<std::pair<int, int>>& out) {
        for (int r = i; r < j; ++r) {
            const MfeCell& br = v_[vid(r, j)];
            if (!br.count) continue;
            const Energy bterm = br.e + em_.multi_pair_term(type_of(r, j));
            if (r == i) {
                if (bterm == e && br.npairs == np) {
                    out.emplace_back(r, j);
                    trace_v(r, j, out);
                    return;
                }
            } else {
                if (free_len_[i] >= r - i && em_.multi_unpaired_term(r - i) + bterm == e &&
                    br.npairs == np) {
                    out.emplace_back(r, j);
                    trace_v(r, j, out);
                    return;
                }
                const MfeCell& head = wm_[vid(i, r - 1)];
                if (head.count && head.e + bterm == e && head.npairs + br.npairs == np) {
                    trace_wm(i, r - 1, head.e, head.npairs, out);
                    out.emplace_back(r, j);
                    trace_v(r, j, out);
                    return;
                }
            }
        }
        if (j == i || !free_pos(j)) throw Error("traceback failed");
        trace_wm(i, j - 1, e - em_.multi_unpaired_term(1), np, out);
    }

    // --- partition pass -------------------------------------------------

    template <class Wt>
    double partition_impl() {
        using T = typename Wt::T;
        const int n = k_;
        const double beta = em_.beta();
        std::vector<T> zv((n + 1) * (n + 1), Wt::zero());
        std::vector<T> zm((n + 1) * (n + 1), Wt::zero());
        std::vector<T> zm2((n + 1) * (n + 1), Wt::zero());
        free_len_.assign(n + 2, 0);
        for (int t = n; t >= 1; --t) free_len_[t] = free_pos(t) ? free_len_[t + 1] + 1 : 0;
        auto wE = [&](Energy e) { return Wt::from_energy(beta, e); };

        for (int span = 2; span <= n; ++span) {
            for (int p = 1; p + span - 1 <= n; ++p) {
                const int q = p + span - 1;
                T& cur = zv[vid(p, q)];
                if (!pair_ok(p, q)) continue;
                if (d_.is_opaque(p, q)) {
                    cur = Wt::one();
                    continue;
                }
                if (q - p - 1 >= mh_ && free_len_[p + 1] >= q - p - 1)
                    cur = Wt::add(cur, wE(em_.hairpin_term(type_of(p, q), at(p + 1), at(q - 1),
                                                           q - p - 1)));
                const int max_n1 = std::min(kMaxTwoLoop, q - p - 2);
                for (int n1 = 0; n1 <= max_n1; ++n1) {
                    const int r = p + 1 + n1;
                    if (n1 > 0 && free_len_[p + 1] < n1) break;
                    const int max_n2 = std::min(kMaxTwoLoop - n1, q - r - 2);
                    for (int n2 = 0; n2 <= max_n2; ++n2) {
                        const int t = q - 1 - n2;
                        if (t <= r) break;
                        if (n2 > 0 && free_len_[t + 1] < n2) break;
                        if (!pair_ok(r, t)) continue;
                        cur = Wt::add(cur, Wt::mul(wE(two_loop(p, q, r, t, n1, n2)),
                                                   zv[vid(r, t)]));
                    }
                }
                if (q - p - 1 >= 2)
                    cur = Wt::add(cur, Wt::mul(wE(em_.multi_closing_term() +
                                                  em_.multi_pair_term(type_of(p, q))),
                                               zm2[vid(p + 1, q - 1)]));
            }
            for (int i = 1; i + span - 1 <= n; ++i) {
                const int j = i + span - 1;
                T& m1 = zm[vid(i, j)];
                T& m2 = zm2[vid(i, j)];
                const T cw = wE(em_.multi_unpaired_term(1));
                if (free_pos(j) && j > i) {
                    m1 = Wt::add(m1, Wt::mul(zm[vid(i, j - 1)], cw));
                    m2 = Wt::add(m2, Wt::mul(zm2[vid(i, j - 1)], cw));
                }
                for (int r = i; r < j; ++r) {
                    if (!pair_ok(r, j)) continue;
                    const T br = Wt::mul(zv[vid(r, j)], wE(em_.multi_pair_term(type_of(r, j))));
                    if (r == i) {
                        m1 = Wt::add(m1, br);
                    } else {
                        if (free_len_[i] >= r - i)
                            m1 = Wt::add(m1, Wt::mul(wE(em_.multi_unpaired_term(r - i)), br));
                        const T head = zm[vid(i, r - 1)];
                        m1 = Wt::add(m1, Wt::mul(head, br));
                        m2 = Wt::add(m2, Wt::mul(head, br));
                    }
                }
            }
        }
        if (d_.closed()) return zv[vid(1, n)];
        std::vector<T> zw(n + 1, Wt::zero());
        zw[0] = Wt::one();
        for (int q = 1; q <= n; ++q) {
            if (free_pos(q)) zw[q] = Wt::add(zw[q], zw[q - 1]);
            for (int r = 1; r < q; ++r) {
                if (!pair_ok(r, q)) continue;
                zw[q] = Wt::add(zw[q],
                                Wt::mul(zw[r - 1], Wt::mul(zv[vid(r, q)],
                                                           wE(em_.external_branch_term(
                                                               type_of(r, q))))));
            }
        }
        return zw[n];
    }

    const EnergyModel& em_;
    std::vector<Nuc> s_;
    const Domain& d_;
    int mh_;
    int k_;
    bool mfe_done_ = false;
    std::vector<MfeCell> v_, wm_, wm2_;
    std::vector<MfeCell> w_;
    std::vector<int> free_len_;
};

inline Domain domain_from_constraints(int seq_len, const FoldConstraints& c) {
    const int lo = c.region_lo;
    const int hi = c.region_hi == 0 ? seq_len : c.region_hi;
    if (lo < 1 || hi > seq_len || lo > hi) throw InfeasibleConstraints("bad region window");
    Domain d;
    for (int i = lo; i <= hi; ++i) d.add_position(i);
    for (auto [i, j] : c.forced_pairs) {
        if (i < lo || j > hi) throw InfeasibleConstraints("forced pair outside region");
        d.force_pair(i - lo + 1, j - lo + 1, false);
    }
    d.finalize();
    return d;
}

// Lifts a region-folded structure back to original coordinates.
inline Structure lift_structure(const Structure& y, const Domain& d, int full_len) {
    std::vector<std::pair<int, int>> pairs;
    for (auto [i, j] : y.pairs()) pairs.emplace_back(d.to_orig(i), d.to_orig(j));
    return Structure::from_pairs(full_len, pairs);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public folding operations
// ---------------------------------------------------------------------------

inline FoldResult fold_domain(const EnergyModel& em, const std::vector<Nuc>& s, const Domain& d,
                              int min_hairpin = kDefaultMinHairpin) {
    detail::FoldDp dp(em, s, d, min_hairpin);
    return dp.mfe();
}

inline double partition_domain_log(const EnergyModel& em, const std::vector<Nuc>& s,
                                   const Domain& d, int min_hairpin = kDefaultMinHairpin,
                                   bool log_space = false) {
    detail::FoldDp dp(em, s, d, min_hairpin);
    return log_space ? dp.log_partition() : std::log(dp.partition());
}

inline FoldResult mfe_fold(const EnergyModel& em, const PartialSequence& x,
                           const FoldConstraints& c = {}, int min_hairpin = kDefaultMinHairpin) {
    const Domain d = detail::domain_from_constraints(x.length(), c);
    FoldResult r = fold_domain(em, domain_nucs(d, x), d, min_hairpin);
    r.structure = detail::lift_structure(r.structure, d, x.length());
    return r;
}

inline EnsembleSummary partition_function(const EnergyModel& em, const PartialSequence& x,
                                          const FoldConstraints& c = {},
                                          int min_hairpin = kDefaultMinHairpin,
                                          bool log_space = false) {
    const Domain d = detail::domain_from_constraints(x.length(), c);
    const auto s = domain_nucs(d, x);
    EnsembleSummary out;
    out.log_q = partition_domain_log(em, s, d, min_hairpin, log_space);
    out.q = std::exp(out.log_q);
    FoldResult r = fold_domain(em, s, d, min_hairpin);
    out.mfe = r.energy;
    out.mfe_structure = detail::lift_structure(r.structure, d, x.length());
    return out;
}

inline double prob_structure(const EnergyModel& em, const PartialSequence& x, const Structure& y,
                             int min_hairpin = kDefaultMinHairpin) {
    if (y.length() != x.length()) throw LengthMismatch("structure/sequence length mismatch");
    for (auto [i, j] : y.pairs())
        if (!is_canonical(x.at(i), x.at(j)))
            throw NotInEnsemble("pair (" + std::to_string(i) + "," + std::to_string(j) +
                                ") is not canonical under the sequence");
    const Domain d = Domain::whole(x.length());
    const auto s = domain_nucs(d, x);
    const double log_q = partition_domain_log(em, s, d, min_hairpin);
    const Energy e = structure_energy(em, y, x);
    return std::exp(-em.beta() * e.deci() - log_q);
}

// Equilibrium probability of a motif within its boundary-constrained
// ensemble. The assignment must cover the motif span.
inline double prob_motif(const EnergyModel& em, const PartialSequence& x, const Motif& m,
                         int min_hairpin = kDefaultMinHairpin) {
    const Domain d = motif_domain(m);
    const auto s = domain_nucs(d, x);
    for (auto [i, j] : m.bpairs())
        if (!is_canonical(x.at(i), x.at(j)))
            throw InfeasibleConstraints("boundary pair (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") is not canonical");
    const double log_q = partition_domain_log(em, s, d, min_hairpin);
    const Energy e = motif_energy(em, m, x);
    return std::exp(-em.beta() * e.deci() - log_q);
}

// ---------------------------------------------------------------------------
// Exhaustive ensemble enumeration (the oracle path)
// ---------------------------------------------------------------------------

// Yields every pseudoknot-free structure over the domain exactly once:
// canonical pairs only, clamped pairs always present, hairpins of at least
// min_hairpin bases except under opaque bricks.
template <typename Callback>
void enumerate_domain_structures(const std::vector<Nuc>& s, const Domain& d, Callback&& f,
                                 int cap = kDefaultEnumCap, int min_hairpin = kDefaultMinHairpin) {
    const int n = d.size();
    if (n > cap)
        throw RegionTooLarge("domain of length " + std::to_string(n) + " exceeds the oracle cap " +
                             std::to_string(cap));
    if (static_cast<int>(s.size()) != n) throw LengthMismatch("sequence/domain size mismatch");
    for (auto [i, j] : d.forced_pairs())
        if (!is_canonical(s[i - 1], s[j - 1]))
            throw InfeasibleConstraints("forced pair (" + std::to_string(d.to_orig(i)) + "," +
                                        std::to_string(d.to_orig(j)) + ") is not canonical");
    struct Frame {
        int open;
        bool has_inner;
    };
    std::vector<Frame> stack;
    std::vector<std::pair<int, int>> pairs;
    std::function<void(int)> walk = [&](int t) {
        if (t > n) {
            if (stack.empty()) f(Structure::from_pairs(n, pairs));
            return;
        }
        auto close_top_and_walk = [&](int r, const Frame& saved) {
            stack.pop_back();
            pairs.emplace_back(r, t);
            bool parent_flag = false;
            if (!stack.empty()) {
                parent_flag = stack.back().has_inner;
                stack.back().has_inner = true;
            }
            walk(t + 1);
            if (!stack.empty()) stack.back().has_inner = parent_flag;
            pairs.pop_back();
            stack.push_back(saved);
        };
        const int fp = d.forced_partner(t);
        if (fp != 0 && fp < t) {  // must close the clamp opened at fp
            if (stack.empty() || stack.back().open != fp) return;
            const Frame saved = stack.back();
            if (saved.has_inner || t - fp - 1 >= min_hairpin || d.is_opaque(fp, t))
                close_top_and_walk(fp, saved);
            return;
        }
        if (fp != 0) {  // must open here
            stack.push_back({t, false});
            walk(t + 1);
            stack.pop_back();
            return;
        }
        // unpaired
        walk(t + 1);
        // close with the innermost open position
        if (!stack.empty()) {
            const Frame saved = stack.back();
            const int r = saved.open;
            const bool hairpin_ok = saved.has_inner || t - r - 1 >= min_hairpin;
            if (d.forced_partner(r) == 0 && hairpin_ok && is_canonical(s[r - 1], s[t - 1]))
                close_top_and_walk(r, saved);
        }
        // open
        stack.push_back({t, false});
        walk(t + 1);
        stack.pop_back();
    };
    walk(1);
}

template <typename Callback>
void enumerate_structures(const PartialSequence& x, const FoldConstraints& c, Callback&& f,
                          int cap = kDefaultEnumCap, int min_hairpin = kDefaultMinHairpin) {
    const Domain d = detail::domain_from_constraints(x.length(), c);
    enumerate_domain_structures(domain_nucs(d, x), d,
                                [&](const Structure& y) {
                                    f(detail::lift_structure(y, d, x.length()));
                                },
                                cap, min_hairpin);
}

}  // namespace pbound
