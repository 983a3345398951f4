#pragma once

// Command-level drivers shared by the CLI and the test suites: structure file
// IO, single-structure analysis, benchmark runs over a directory, and
// decomposition counting. Reports are plain data; formatting helpers render
// text, JSON, or CSV. Timing fields are kept in dedicated columns so that
// deterministic comparisons can drop them.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbound/cache.hpp"
#include "pbound/common.hpp"
#include "pbound/decomp.hpp"
#include "pbound/energy_model.hpp"
#include "pbound/structure.hpp"

namespace pbound {

enum class OutputFormat { Text, Json, Csv };

struct RunConfig {
    std::string params_path = "data/params_default.txt";
    std::string cache_path;  // empty: in-memory
    DecompConfig decomp;
    BoundParams bound;
    double rt = 0.6163;
    bool no_lonely_pairs = false;
    OutputFormat format = OutputFormat::Text;
    int jobs = 0;  // 0: hardware default
    bool explain = false;

    ParseOptions parse_options() const {
        return ParseOptions{bound.min_hairpin, !no_lonely_pairs};
    }

    void validate() const {
        decomp.validate();
        if (bound.samples < 1 || bound.max_assignments < 1 || rt <= 0 || bound.min_hairpin < 0 ||
            jobs < 0)
            throw ConfigError("numeric configuration fields must be positive");
    }
};

inline EnergyModel load_model(const RunConfig& cfg) {
    EnergyModel em = load_params(cfg.params_path);
    em.rt = cfg.rt;
    return em;
}

inline void apply_jobs(const RunConfig& cfg) {
#ifdef _OPENMP
    if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
#endif
}

// ---------------------------------------------------------------------------
// Structure files: one structure per line, '#' comments, optional ">name"
// headers naming the following structure.
// ---------------------------------------------------------------------------

struct NamedStructure {
    std::string name;
    Structure structure;
    int lineno = 0;
};

struct StructureFile {
    std::vector<NamedStructure> structures;
    std::vector<std::string> errors;
};

inline StructureFile read_structure_file(const std::string& path, const ParseOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw InputFileError("cannot open structure file: " + path);
    StructureFile out;
    std::string line, pending_name;
    int lineno = 0, index = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        std::string tok = line.substr(first, last - first + 1);
        if (tok[0] == '#') continue;
        if (tok[0] == '>') {
            pending_name = tok.substr(1);
            continue;
        }
        ++index;
        std::string name = pending_name.empty() ? "s" + std::to_string(index) : pending_name;
        pending_name.clear();
        try {
            out.structures.push_back({name, parse_dotbracket(tok, opts), lineno});
        } catch (const Error& e) {
            out.errors.push_back(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct AnalyzeReport {
    std::string name;
    Structure structure;
    PBoundRecord record;
    DecompResult decomp;
    std::string hash;
    double seconds = 0;
};

inline AnalyzeReport analyze_structure(const EnergyModel& em, const std::string& name,
                                       const Structure& y, const RunConfig& cfg,
                                       BoundCache* cache) {
    const auto t0 = std::chrono::steady_clock::now();
    auto [rec, res] = structure_pbound(em, y, cfg.decomp, cfg.bound, cache, cfg.explain);
    AnalyzeReport rep;
    rep.name = name;
    rep.structure = y;
    rep.record = std::move(rec);
    rep.decomp = std::move(res);
    rep.hash = params_hash(em, cfg.bound);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline nlohmann::json motif_entry_json(const Motif& m, const PBoundRecord& r, bool explain) {
    nlohmann::json j = record_to_json(r);
    j["card"] = m.card();
    j["length"] = m.length();
    j["span"] = {m.span_positions().front(), m.span_positions().back()};
    if (explain && r.witness) {
        j["witness"] = *r.witness;
        if (!r.witness_ddg.empty()) j["witness_ddg"] = r.witness_ddg;
    }
    return j;
}

inline nlohmann::json analyze_json(const AnalyzeReport& rep, const RunConfig& cfg) {
    nlohmann::json j;
    j["schema"] = 1;
    j["name"] = rep.name;
    j["length"] = rep.structure.length();
    j["structure"] = rep.structure.dotbracket();
    j["pbound"] = rep.record.pbound;
    j["method"] = to_string(rep.record.method);
    j["umfe_undesignable"] = rep.record.umfe_undesignable;
    j["count_explored"] = rep.decomp.count_explored.str();
    j["decomposition"] = nlohmann::json::array();
    for (const auto& [m, r] : rep.decomp.motifs)
        j["decomposition"].push_back(motif_entry_json(m, r, cfg.explain));
    j["params"] = {{"rt", cfg.rt},
                   {"seed", cfg.bound.seed},
                   {"samples", cfg.bound.samples},
                   {"max_assignments", cfg.bound.max_assignments},
                   {"exact_len_cap", cfg.bound.exact_len_cap},
                   {"max_depth", cfg.decomp.max_depth},
                   {"max_width", cfg.decomp.max_width},
                   {"max_loops", cfg.decomp.max_loop},
                   {"min_hairpin", cfg.bound.min_hairpin},
                   {"eval_leaf_hairpins", cfg.decomp.eval_leaf_hairpins},
                   {"params_hash", rep.hash}};
    j["timing"] = {{"total_s", rep.seconds}};
    return j;
}

inline std::string analyze_text(const AnalyzeReport& rep, const RunConfig& cfg) {
    std::ostringstream os;
    os << "name:    " << rep.name << "\n";
    os << "struct:  " << rep.structure.dotbracket() << "\n";
    os << "length:  " << rep.structure.length() << "\n";
    os << "pbound:  " << format_double(rep.record.pbound) << " (" << to_string(rep.record.method)
       << ")\n";
    os << "umfe_undesignable: " << (rep.record.umfe_undesignable ? "true" : "false") << "\n";
    os << "decompositions_explored: " << rep.decomp.count_explored.str() << "\n";
    os << "optimal decomposition (" << rep.decomp.motifs.size() << " motifs):\n";
    for (const auto& [m, r] : rep.decomp.motifs) {
        os << "  " << r.key << "  pbound=" << format_double(r.pbound) << " method="
           << to_string(r.method);
        if (r.ddg_max) os << " ddg_max=" << format_double(*r.ddg_max);
        if (r.rival_count) os << " rivals=" << r.rival_count;
        if (r.umfe_undesignable) os << " umfe_undesignable";
        os << "\n";
        if (cfg.explain && r.witness) {
            os << "    witness: " << *r.witness << "\n";
            if (!r.witness_ddg.empty()) {
                os << "    per-rival ddg:";
                for (double g : r.witness_ddg) os << " " << format_double(g);
                os << "\n";
            }
        }
    }
    os << "rt: " << format_double(cfg.rt) << "  params_hash: " << rep.hash << "\n";
    os << "time_s: " << format_double(rep.seconds) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Benchmark runs
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string name;
    int length = 0;
    double pbound = 1.0;
    int motifs = 0, exact = 0, approx = 0, skipped = 0;
    std::string count_explored;
    bool umfe_undesignable = false;
    double seconds = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double mean_pbound = 0;
    std::vector<std::string> errors;
    double seconds = 0;
};

inline BenchReport run_bench(const EnergyModel& em, const std::string& dir, const RunConfig& cfg,
                             BoundCache* cache, std::ostream* progress = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!std::filesystem::is_directory(dir))
        throw InputFileError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path().string());
    std::sort(files.begin(), files.end());

    BenchReport rep;
    std::vector<NamedStructure> inputs;
    for (const auto& f : files) {
        StructureFile sf = read_structure_file(f, cfg.parse_options());
        rep.errors.insert(rep.errors.end(), sf.errors.begin(), sf.errors.end());
        inputs.insert(inputs.end(), sf.structures.begin(), sf.structures.end());
    }

    rep.rows.resize(inputs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int64_t i = 0; i < static_cast<int64_t>(inputs.size()); ++i) {
        const auto& in = inputs[i];
        AnalyzeReport ar = analyze_structure(em, in.name, in.structure, cfg, cache);
        BenchRow row;
        row.name = in.name;
        row.length = in.structure.length();
        row.pbound = ar.record.pbound;
        row.motifs = static_cast<int>(ar.decomp.motifs.size());
        for (const auto& [m, r] : ar.decomp.motifs) {
            if (r.method == BoundMethod::Exact) ++row.exact;
            if (r.method == BoundMethod::Approx) ++row.approx;
            if (r.method == BoundMethod::Skipped) ++row.skipped;
        }
        row.count_explored = ar.decomp.count_explored.str();
        row.umfe_undesignable = ar.record.umfe_undesignable;
        row.seconds = ar.seconds;
        rep.rows[i] = std::move(row);
        if (progress) {
#ifdef _OPENMP
#pragma omp critical
#endif
            (*progress) << "analyzed " << in.name << " pbound=" << format_double(ar.record.pbound)
                        << "\n";
        }
    }
    double sum = 0;
    for (const BenchRow& r : rep.rows) sum += r.pbound;
    rep.mean_pbound = rep.rows.empty() ? 0.0 : sum / static_cast<double>(rep.rows.size());
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// CSV schema v1; the timing column is last so determinism checks can drop it.
inline std::string bench_csv(const BenchReport& rep) {
    std::ostringstream os;
    os << "name,length,pbound,motifs,exact,approx,skipped,count_explored,umfe_undesignable,time_s\n";
    for (const BenchRow& r : rep.rows) {
        os << r.name << ',' << r.length << ',' << format_double(r.pbound) << ',' << r.motifs << ','
           << r.exact << ',' << r.approx << ',' << r.skipped << ',' << r.count_explored << ','
           << (r.umfe_undesignable ? "true" : "false") << ',' << format_double(r.seconds) << "\n";
    }
    os << "__mean__,," << format_double(rep.mean_pbound) << ",,,,,,,\n";
    return os.str();
}

inline nlohmann::json bench_json(const BenchReport& rep) {
    nlohmann::json j;
    j["schema"] = 1;
    j["rows"] = nlohmann::json::array();
    for (const BenchRow& r : rep.rows)
        j["rows"].push_back({{"name", r.name},
                             {"length", r.length},
                             {"pbound", r.pbound},
                             {"motifs", r.motifs},
                             {"exact", r.exact},
                             {"approx", r.approx},
                             {"skipped", r.skipped},
                             {"count_explored", r.count_explored},
                             {"umfe_undesignable", r.umfe_undesignable},
                             {"time_s", r.seconds}});
    j["mean_pbound"] = rep.mean_pbound;
    j["time_s"] = rep.seconds;
    return j;
}

inline std::string bench_text(const BenchReport& rep) {
    std::ostringstream os;
    for (const BenchRow& r : rep.rows)
        os << r.name << "  n=" << r.length << "  pbound=" << format_double(r.pbound) << "  motifs="
           << r.motifs << " (" << r.exact << " exact, " << r.approx << " approx, " << r.skipped
           << " skipped)  count=" << r.count_explored
           << (r.umfe_undesignable ? "  umfe_undesignable" : "") << "\n";
    os << "mean pbound: " << format_double(rep.mean_pbound) << " over " << rep.rows.size()
       << " structures\n";
    return os.str();
}

}  // namespace pbound
