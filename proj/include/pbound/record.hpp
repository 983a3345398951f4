#pragma once

// Probability upper-bound records with method provenance.

#include <optional>
#include <string>
#include <vector>

#include "pbound/common.hpp"

namespace pbound {

enum class BoundMethod : uint8_t { Exact, Approx, Skipped };

inline const char* to_string(BoundMethod m) {
    switch (m) {
        case BoundMethod::Exact: return "exact";
        case BoundMethod::Approx: return "approx";
        case BoundMethod::Skipped: return "skipped";
    }
    return "?";
}

inline BoundMethod bound_method_from_string(const std::string& s) {
    if (s == "exact") return BoundMethod::Exact;
    if (s == "approx") return BoundMethod::Approx;
    if (s == "skipped") return BoundMethod::Skipped;
    throw ParseError("unknown bound method: " + s);
}

struct PBoundRecord {
    std::string key;        // canonical motif key, or a structure id
    double pbound = 1.0;    // in (0, 1]; 1 when skipped
    BoundMethod method = BoundMethod::Skipped;
    std::optional<double> ddg_max;  // deci-kcal/mol; present for approx
    int rival_count = 0;
    bool umfe_undesignable = false;
    std::string params_hash;

    // Interpretability extras; not part of the persisted cache schema.
    std::optional<std::string> witness;   // maximizing assignment over the folding domain
    std::vector<double> witness_ddg;      // per-rival gap at the witness (explain mode)
};

}  // namespace pbound
