#pragma once

// Nearest-neighbor energy model. All tables hold exact integers in
// deci-kcal/mol; a loop's energy depends only on its critical positions.
// Dangling ends are not modeled: external and multiloop mismatch positions
// are tracked for differential-position purposes but contribute 0 here.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pbound/common.hpp"
#include "pbound/domain.hpp"
#include "pbound/loops.hpp"
#include "pbound/sequence.hpp"
#include "pbound/structure.hpp"

namespace pbound {

inline constexpr int kMaxTabulatedLen = 30;

class EnergyModel {
  public:
    int32_t stack[6][6] = {};
    int32_t hairpin_len[kMaxTabulatedLen + 1] = {};
    int32_t bulge_len[kMaxTabulatedLen + 1] = {};
    int32_t internal_len[kMaxTabulatedLen + 1] = {};
    int32_t mm_hairpin[6][4][4] = {};
    int32_t mm_internal[6][4][4] = {};
    int32_t multi_close = 0;
    int32_t multi_branch = 0;
    int32_t multi_unpaired = 0;
    int32_t au_penalty = 0;
    int32_t ninio_slope = 0;
    int32_t ninio_cap = 0;
    double rt = 0.6163;  // kcal/mol at 37 C

    // Boltzmann factor exponent per deci-kcal.
    double beta() const { return 1.0 / (10.0 * rt); }
    double boltzmann(Energy e) const { return e.is_inf() ? 0.0 : std::exp(-e.deci() * beta()); }

    int32_t au_term(PairType t) const {
        return (t == PairType::CG || t == PairType::GC) ? 0 : au_penalty;
    }

    // Jacobson-Stockmayer extrapolation beyond the tabulated lengths.
    int32_t extrapolate(const int32_t* table, int len) const {
        if (len <= kMaxTabulatedLen) return table[len];
        const double extra = 10.0 * 1.75 * rt * std::log(static_cast<double>(len) / kMaxTabulatedLen);
        return table[kMaxTabulatedLen] + static_cast<int32_t>(std::lround(extra));
    }

    Energy stack_term(PairType outer, PairType inner) const {
        return Energy(stack[static_cast<int>(outer)][static_cast<int>(inner)]);
    }

    Energy hairpin_term(PairType cp, Nuc a, Nuc b, int len) const {
        return Energy(extrapolate(hairpin_len, len) +
                      mm_hairpin[static_cast<int>(cp)][static_cast<int>(a)][static_cast<int>(b)] +
                      au_term(cp));
    }

    Energy bulge_term(PairType outer, PairType inner, int len) const {
        int32_t e = extrapolate(bulge_len, len);
        if (len == 1) e += stack[static_cast<int>(outer)][static_cast<int>(inner)];
        return Energy(e);
    }

    // Mismatch orientation: each pair is read looking into the loop, so the
    // inner pair (k, l) enters as the reversed type (x_l, x_k) with
    // neighbors (x_{l+1}, x_{k-1}).
    Energy internal_term(PairType outer, PairType inner_rev, int n1, int n2, Nuc o1, Nuc o2, Nuc i1,
                         Nuc i2) const {
        const int asym = n1 > n2 ? n1 - n2 : n2 - n1;
        const int32_t ninio = std::min(ninio_cap, ninio_slope * asym);
        return Energy(extrapolate(internal_len, n1 + n2) + ninio +
                      mm_internal[static_cast<int>(outer)][static_cast<int>(o1)][static_cast<int>(o2)] +
                      mm_internal[static_cast<int>(inner_rev)][static_cast<int>(i1)][static_cast<int>(i2)]);
    }

    Energy two_loop_term(PairType outer, PairType inner, int n1, int n2, Nuc o1, Nuc o2, Nuc i1,
                         Nuc i2, PairType inner_rev) const {
        if (n1 == 0 && n2 == 0) return stack_term(outer, inner);
        if (n1 == 0 || n2 == 0) return bulge_term(outer, inner, n1 + n2);
        return internal_term(outer, inner_rev, n1, n2, o1, o2, i1, i2);
    }

    Energy multi_pair_term(PairType t) const { return Energy(multi_branch + au_term(t)); }
    Energy multi_closing_term() const { return Energy(multi_close); }
    Energy multi_unpaired_term(int count) const { return Energy(multi_unpaired * count); }
    Energy external_branch_term(PairType t) const { return Energy(au_term(t)); }
};

// ---------------------------------------------------------------------------
// Loop / structure / motif energies
// ---------------------------------------------------------------------------

namespace detail {

// `at(i)` returns the nucleotide at position i; throws IncompleteAssignment
// when unassigned. Non-canonical closing pairs either throw or yield +INF
// (the latter backs rival evaluation, where an incompatible rival simply has
// zero Boltzmann weight).
template <typename At>
Energy loop_energy_impl(const EnergyModel& em, const Loop& z, At&& at, bool throw_noncanonical) {
    const auto& cp = z.closing_pairs();
    std::vector<PairType> types(cp.size());
    for (size_t k = 0; k < cp.size(); ++k) {
        const int t = pair_type_index(at(cp[k].first), at(cp[k].second));
        if (t < 0) {
            if (throw_noncanonical)
                throw NonCanonicalPair("pair (" + std::to_string(cp[k].first) + "," +
                                       std::to_string(cp[k].second) + ") is not canonical");
            return Energy::inf();
        }
        types[k] = static_cast<PairType>(t);
    }
    switch (z.kind()) {
        case LoopKind::External: {
            Energy e = Energy::zero();
            for (PairType t : types) e += em.external_branch_term(t);
            return e;
        }
        case LoopKind::Hairpin: {
            auto [i, j] = cp[0];
            return em.hairpin_term(types[0], at(i + 1), at(j - 1), z.unpaired_count());
        }
        case LoopKind::Stack:
            return em.stack_term(types[0], types[1]);
        case LoopKind::Bulge:
            return em.bulge_term(types[0], types[1], z.unpaired_count());
        case LoopKind::Internal: {
            auto [i, j] = cp[0];
            auto [k, l] = cp[1];
            const int rev = pair_type_index(at(l), at(k));
            return em.internal_term(types[0], static_cast<PairType>(rev), k - i - 1, j - l - 1,
                                    at(i + 1), at(j - 1), at(l + 1), at(k - 1));
        }
        case LoopKind::Multi: {
            Energy e = em.multi_closing_term() + em.multi_unpaired_term(z.unpaired_count());
            for (PairType t : types) e += em.multi_pair_term(t);
            return e;
        }
    }
    throw Error("bad loop kind");
}

}  // namespace detail

inline Energy loop_energy(const EnergyModel& em, const Loop& z, const PartialSequence& x) {
    return detail::loop_energy_impl(em, z, [&](int i) { return x.at(i); }, true);
}

// Rival-side evaluation: +INF instead of throwing on a non-canonical pair.
inline Energy loop_energy_or_inf(const EnergyModel& em, const Loop& z, const PartialSequence& x) {
    return detail::loop_energy_impl(em, z, [&](int i) { return x.at(i); }, false);
}

inline Energy loop_energy_nucs(const EnergyModel& em, const Loop& z, const std::vector<Nuc>& s) {
    return detail::loop_energy_impl(em, z, [&](int i) { return s[i - 1]; }, true);
}

inline Energy structure_energy(const EnergyModel& em, const Structure& y, const PartialSequence& x) {
    Energy e = Energy::zero();
    for (const Loop& z : decompose_loops(y)) e += loop_energy(em, z, x);
    return e;
}

template <typename MotifLike>
Energy motif_energy(const EnergyModel& em, const MotifLike& m, const PartialSequence& x) {
    Energy e = Energy::zero();
    for (const Loop& z : m.loops()) e += loop_energy(em, z, x);
    return e;
}

// Energy of a pairing over a constrained domain: the sum over its loops,
// with opaque bricks separating no energy of their own.
inline Energy domain_structure_energy(const EnergyModel& em, const Domain& d,
                                      const std::vector<Nuc>& s, const Structure& y) {
    Energy e = Energy::zero();
    for (const Loop& z : domain_loops(d, y)) e += loop_energy_nucs(em, z, s);
    return e;
}

// ---------------------------------------------------------------------------
// Parameter loading
// ---------------------------------------------------------------------------

namespace detail {

class ParamReader {
  public:
    explicit ParamReader(const std::string& path) : in_(path), path_(path) {
        if (!in_) throw ParseError("cannot open parameter file: " + path);
    }

    // Next whitespace-separated integer within the current section; returns
    // false if a new section header (or EOF) comes first.
    bool next_int(int32_t& out) {
        for (;;) {
            if (!(line_ >> token_)) {
                if (!refill()) return false;
                continue;
            }
            if (token_[0] == '[') {
                pending_header_ = token_;
                return false;
            }
            try {
                size_t used = 0;
                const long v = std::stol(token_, &used);
                if (used != token_.size()) throw std::invalid_argument(token_);
                out = static_cast<int32_t>(v);
            } catch (const std::exception&) {
                throw ParseError(path_ + ":" + std::to_string(lineno_) + ": expected integer, got '" +
                                 token_ + "'");
            }
            return true;
        }
    }

    int32_t require_int(const std::string& section) {
        int32_t v;
        if (!next_int(v))
            throw ParseError(path_ + ":" + std::to_string(lineno_) + ": section " + section +
                             " ended early");
        return v;
    }

    bool next_header(std::string& out) {
        if (!pending_header_.empty()) {
            out = pending_header_;
            pending_header_.clear();
            return true;
        }
        int32_t dummy;
        while (next_int(dummy)) {
        }  // skip stray numbers before a header
        if (pending_header_.empty()) return false;
        out = pending_header_;
        pending_header_.clear();
        return true;
    }

    int lineno() const { return lineno_; }
    const std::string& path() const { return path_; }

  private:
    bool refill() {
        std::string raw;
        if (!std::getline(in_, raw)) return false;
        ++lineno_;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        line_ = std::istringstream(raw);
        return true;
    }

    std::ifstream in_;
    std::string path_;
    std::istringstream line_;
    std::string token_;
    std::string pending_header_;
    int lineno_ = 0;
};

}  // namespace detail

inline EnergyModel load_params(const std::string& path) {
    detail::ParamReader r(path);
    EnergyModel em;
    bool saw_stack = false, saw_hairpin = false;
    std::string header;
    while (r.next_header(header)) {
        if (header == "[STACK]") {
            saw_stack = true;
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b) em.stack[a][b] = r.require_int(header);
        } else if (header == "[HAIRPIN_LENGTH]") {
            saw_hairpin = true;
            for (int i = 0; i <= kMaxTabulatedLen; ++i) em.hairpin_len[i] = r.require_int(header);
        } else if (header == "[BULGE_LENGTH]") {
            for (int i = 0; i <= kMaxTabulatedLen; ++i) em.bulge_len[i] = r.require_int(header);
        } else if (header == "[INTERNAL_LENGTH]") {
            for (int i = 0; i <= kMaxTabulatedLen; ++i) em.internal_len[i] = r.require_int(header);
        } else if (header == "[HAIRPIN_MISMATCH]") {
            for (int p = 0; p < 6; ++p)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) em.mm_hairpin[p][a][b] = r.require_int(header);
        } else if (header == "[INTERNAL_MISMATCH]") {
            for (int p = 0; p < 6; ++p)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) em.mm_internal[p][a][b] = r.require_int(header);
        } else if (header == "[MULTI]") {
            em.multi_close = r.require_int(header);
            em.multi_branch = r.require_int(header);
            em.multi_unpaired = r.require_int(header);
        } else if (header == "[AU_PENALTY]") {
            em.au_penalty = r.require_int(header);
        } else if (header == "[NINIO]") {
            em.ninio_slope = r.require_int(header);
            em.ninio_cap = r.require_int(header);
        } else {
            throw ParseError(r.path() + ":" + std::to_string(r.lineno()) + ": unknown section " +
                             header);
        }
    }
    if (!saw_stack) throw MissingSection("parameter file lacks [STACK]");
    if (!saw_hairpin) throw MissingSection("parameter file lacks [HAIRPIN_LENGTH]");
    return em;
}

// Canonical byte dump of the model; feeds the parameter digest that guards
// cached bound records.
inline std::string model_fingerprint(const EnergyModel& em) {
    std::ostringstream os;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) os << em.stack[a][b] << ',';
    for (int i = 0; i <= kMaxTabulatedLen; ++i)
        os << em.hairpin_len[i] << ',' << em.bulge_len[i] << ',' << em.internal_len[i] << ',';
    for (int p = 0; p < 6; ++p)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) os << em.mm_hairpin[p][a][b] << ',' << em.mm_internal[p][a][b] << ',';
    os << em.multi_close << ',' << em.multi_branch << ',' << em.multi_unpaired << ','
       << em.au_penalty << ',' << em.ninio_slope << ',' << em.ninio_cap << ',' << em.rt;
    return os.str();
}

}  // namespace pbound
