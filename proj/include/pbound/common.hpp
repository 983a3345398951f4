#pragma once

// Shared vocabulary: nucleotide and base-pair codes, integer free energies in
// deci-kcal/mol, error types, and small hashing/RNG utilities.

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbound {

inline constexpr const char* kVersion = "0.1.0";

// Default ceiling on differential-assignment enumerations; beyond it a bound
// is skipped rather than computed.
inline constexpr uint64_t kDefaultAssignmentCap = 10'000'000;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define PBOUND_DEFINE_ERROR(Name)  \
    class Name : public Error {    \
      public:                      \
        using Error::Error;        \
    }

PBOUND_DEFINE_ERROR(IllegalCharacter);
PBOUND_DEFINE_ERROR(UnbalancedBrackets);
PBOUND_DEFINE_ERROR(HairpinTooSmall);
PBOUND_DEFINE_ERROR(LonelyPair);
PBOUND_DEFINE_ERROR(NotContiguous);
PBOUND_DEFINE_ERROR(MissingPosition);
PBOUND_DEFINE_ERROR(ParseError);
PBOUND_DEFINE_ERROR(MissingSection);
PBOUND_DEFINE_ERROR(IncompleteAssignment);
PBOUND_DEFINE_ERROR(NonCanonicalPair);
PBOUND_DEFINE_ERROR(InfeasibleConstraints);
PBOUND_DEFINE_ERROR(RegionTooLarge);
PBOUND_DEFINE_ERROR(NotInEnsemble);
PBOUND_DEFINE_ERROR(MotifTooLarge);
PBOUND_DEFINE_ERROR(LengthMismatch);
PBOUND_DEFINE_ERROR(EmptyRivalSet);
PBOUND_DEFINE_ERROR(NoRivalsFound);
PBOUND_DEFINE_ERROR(PersistenceError);
PBOUND_DEFINE_ERROR(ConfigError);
PBOUND_DEFINE_ERROR(InputFileError);

#undef PBOUND_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Nucleotides and canonical base pairs
// ---------------------------------------------------------------------------

enum class Nuc : uint8_t { A = 0, C = 1, G = 2, U = 3 };

inline constexpr int kNumNucs = 4;
inline constexpr std::array<char, 4> kNucChar = {'A', 'C', 'G', 'U'};

inline char to_char(Nuc n) { return kNucChar[static_cast<int>(n)]; }

inline Nuc nuc_from_char(char c) {
    switch (c) {
        case 'A': case 'a': return Nuc::A;
        case 'C': case 'c': return Nuc::C;
        case 'G': case 'g': return Nuc::G;
        case 'U': case 'u':
        case 'T': case 't': return Nuc::U;
        default: throw IllegalCharacter(std::string("not a nucleotide: '") + c + "'");
    }
}

// Canonical pair types in fixed order: CG, GC, AU, UA, GU, UG.
enum class PairType : uint8_t { CG = 0, GC = 1, AU = 2, UA = 3, GU = 4, UG = 5 };

inline constexpr int kNumPairTypes = 6;
inline constexpr std::array<const char*, 6> kPairTypeName = {"CG", "GC", "AU", "UA", "GU", "UG"};

// 4x4 lookup, -1 for non-canonical combinations.
inline constexpr std::array<std::array<int8_t, 4>, 4> kPairTypeTable = {{
    //        A   C   G   U
    /* A */ {{-1, -1, -1, 2}},
    /* C */ {{-1, -1, 0, -1}},
    /* G */ {{-1, 1, -1, 4}},
    /* U */ {{3, -1, 5, -1}},
}};

inline int pair_type_index(Nuc a, Nuc b) {
    return kPairTypeTable[static_cast<int>(a)][static_cast<int>(b)];
}

inline bool is_canonical(Nuc a, Nuc b) { return pair_type_index(a, b) >= 0; }

inline std::pair<Nuc, Nuc> pair_nucs(PairType t) {
    switch (t) {
        case PairType::CG: return {Nuc::C, Nuc::G};
        case PairType::GC: return {Nuc::G, Nuc::C};
        case PairType::AU: return {Nuc::A, Nuc::U};
        case PairType::UA: return {Nuc::U, Nuc::A};
        case PairType::GU: return {Nuc::G, Nuc::U};
        case PairType::UG: return {Nuc::U, Nuc::G};
    }
    throw Error("bad pair type");
}

// ---------------------------------------------------------------------------
// Energy: exact integer arithmetic in deci-kcal/mol with an absorbing +INF
// ---------------------------------------------------------------------------

class Energy {
  public:
    static constexpr int32_t kInfValue = 1'000'000'000;

    constexpr Energy() = default;
    constexpr explicit Energy(int32_t deci) : v_(deci) {}

    static constexpr Energy inf() { return Energy(kInfValue); }
    static constexpr Energy zero() { return Energy(0); }

    constexpr bool is_inf() const { return v_ >= kInfValue; }
    constexpr int32_t deci() const { return v_; }
    constexpr double kcal() const { return v_ / 10.0; }

    friend constexpr Energy operator+(Energy a, Energy b) {
        if (a.is_inf() || b.is_inf()) return inf();
        return Energy(a.v_ + b.v_);
    }
    friend constexpr Energy operator-(Energy a, Energy b) {
        if (a.is_inf() || b.is_inf()) return inf();
        return Energy(a.v_ - b.v_);
    }
    Energy& operator+=(Energy o) { return *this = *this + o; }
    friend constexpr bool operator==(Energy a, Energy b) { return a.v_ == b.v_; }
    friend constexpr bool operator!=(Energy a, Energy b) { return a.v_ != b.v_; }
    friend constexpr bool operator<(Energy a, Energy b) { return a.v_ < b.v_; }
    friend constexpr bool operator<=(Energy a, Energy b) { return a.v_ <= b.v_; }
    friend constexpr bool operator>(Energy a, Energy b) { return a.v_ > b.v_; }
    friend constexpr bool operator>=(Energy a, Energy b) { return a.v_ >= b.v_; }

  private:
    int32_t v_ = 0;
};

// ---------------------------------------------------------------------------
// Deterministic utilities
// ---------------------------------------------------------------------------

// FNV-1a, used for parameter digests and per-motif seed derivation. Stable
// across platforms, unlike std::hash.
inline uint64_t fnv1a(const void* data, size_t len, uint64_t h = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 14695981039346656037ull) {
    return fnv1a(s.data(), s.size(), h);
}

// Small deterministic RNG (splitmix64). The standard distributions are
// implementation-defined, so bounded draws are done by rejection here.
class Rng {
  public:
    explicit Rng(uint64_t seed) : s_(seed) {}

    uint64_t next() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n), n >= 1.
    uint64_t below(uint64_t n) {
        const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
        uint64_t r = next();
        while (r >= limit) r = next();
        return r % n;
    }

  private:
    uint64_t s_;
};

}  // namespace pbound
