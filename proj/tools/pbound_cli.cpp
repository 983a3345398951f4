// pbound: rigorous upper bounds on the equilibrium probability any RNA
// sequence can assign to a target secondary structure.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "pbound/pbound.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

void add_common_flags(CLI::App* app, pbound::RunConfig& cfg, std::string& format) {
    app->add_option("--params", cfg.params_path, "energy parameter file")
        ->capture_default_str();
    app->add_option("--cache", cfg.cache_path, "bound cache path (JSON lines)");
    app->add_option("--max-depth", cfg.decomp.max_depth, "motif candidate depth limit")
        ->capture_default_str();
    app->add_option("--max-width", cfg.decomp.max_width, "motif candidate width limit")
        ->capture_default_str();
    app->add_option("--max-loops", cfg.decomp.max_loop, "motif candidate loop-count limit")
        ->capture_default_str();
    app->add_option("--exact-len", cfg.decomp.exact_len_cap,
                    "exact enumeration for motifs up to this many bases")
        ->capture_default_str();
    app->add_option("--samples", cfg.bound.samples, "rival sampling draws per motif")
        ->capture_default_str();
    app->add_option("--seed", cfg.bound.seed, "rival sampling seed")->capture_default_str();
    app->add_option("--max-assignments", cfg.bound.max_assignments,
                    "differential assignment budget before skipping")
        ->capture_default_str();
    app->add_option("--rt", cfg.rt, "RT in kcal/mol")->capture_default_str();
    app->add_option("--format", format, "output format: text|json|csv")->capture_default_str();
    app->add_option("--jobs", cfg.jobs, "worker cap for parallel enumeration (0 = hardware)")
        ->capture_default_str();
    app->add_flag("--explain", cfg.explain, "emit maximizing assignments and per-rival gaps");
    app->add_flag("--no-lonely-pairs", cfg.no_lonely_pairs, "reject structures with isolated pairs");
    app->add_flag("--eval-leaf-hairpins", cfg.decomp.eval_leaf_hairpins,
                  "bound leaf hairpin motifs instead of using the base case");
}

pbound::OutputFormat parse_format(const std::string& s) {
    if (s == "text") return pbound::OutputFormat::Text;
    if (s == "json") return pbound::OutputFormat::Json;
    if (s == "csv") return pbound::OutputFormat::Csv;
    throw pbound::ConfigError("unknown format: " + s);
}

void finalize_config(pbound::RunConfig& cfg, const std::string& format) {
    cfg.format = parse_format(format);
    cfg.bound.exact_len_cap = cfg.decomp.exact_len_cap;
    if (cfg.cache_path.empty())
        if (const char* env = std::getenv("PBOUND_CACHE")) cfg.cache_path = env;
    cfg.validate();
    pbound::apply_jobs(cfg);
}

int run_analyze(const std::string& path, pbound::RunConfig& cfg) {
    const pbound::EnergyModel em = pbound::load_model(cfg);
    pbound::StructureFile sf = pbound::read_structure_file(path, cfg.parse_options());
    for (const auto& e : sf.errors) std::cerr << e << "\n";
    if (sf.structures.empty()) {
        std::cerr << path << ": no parseable structure\n";
        return kExitInput;
    }
    pbound::BoundCache cache(cfg.cache_path);
    const auto& in = sf.structures.front();
    const pbound::AnalyzeReport rep =
        pbound::analyze_structure(em, in.name, in.structure, cfg, &cache);
    if (cfg.format == pbound::OutputFormat::Json)
        std::cout << pbound::analyze_json(rep, cfg).dump(2) << "\n";
    else
        std::cout << pbound::analyze_text(rep, cfg);
    return kExitOk;
}

int run_bench(const std::string& dir, pbound::RunConfig& cfg) {
    const pbound::EnergyModel em = pbound::load_model(cfg);
    pbound::BoundCache cache(cfg.cache_path);
    const pbound::BenchReport rep = pbound::run_bench(em, dir, cfg, &cache, &std::cerr);
    for (const auto& e : rep.errors) std::cerr << e << "\n";
    switch (cfg.format) {
        case pbound::OutputFormat::Csv: std::cout << pbound::bench_csv(rep); break;
        case pbound::OutputFormat::Json: std::cout << pbound::bench_json(rep).dump(2) << "\n"; break;
        case pbound::OutputFormat::Text: std::cout << pbound::bench_text(rep); break;
    }
    return kExitOk;
}

int run_count(const std::string& path, pbound::RunConfig& cfg) {
    pbound::StructureFile sf = pbound::read_structure_file(path, cfg.parse_options());
    for (const auto& e : sf.errors) std::cerr << e << "\n";
    if (sf.structures.empty()) {
        std::cerr << path << ": no parseable structure\n";
        return kExitInput;
    }
    auto tree = std::make_shared<const pbound::LoopTree>(
        pbound::build_loop_tree(sf.structures.front().structure));
    std::cout << pbound::count_decompositions(tree, tree->root(), cfg.decomp).str() << "\n";
    return kExitOk;
}

int run_cache(const std::string& action, pbound::RunConfig& cfg) {
    if (cfg.cache_path.empty()) throw pbound::ConfigError("cache path required (--cache)");
    pbound::BoundCache cache(cfg.cache_path);
    if (action == "inspect") {
        const pbound::EnergyModel em = pbound::load_model(cfg);
        const std::string hash = pbound::params_hash(em, cfg.bound);
        std::cout << "path: " << cache.path() << "\n";
        std::cout << "entries: " << cache.size() << "\n";
        std::cout << "current params_hash: " << hash << "\n";
        return kExitOk;
    }
    if (action == "compact") {
        cache.compact();
        std::cout << "compacted " << cache.size() << " entries\n";
        return kExitOk;
    }
    throw pbound::ConfigError("cache action must be inspect or compact");
}

// Quick self-verification of the folding engine against exhaustive
// enumeration.
int run_oracle(int trials, uint64_t seed, pbound::RunConfig& cfg) {
    const pbound::EnergyModel em = pbound::load_model(cfg);
    pbound::Rng rng(seed);
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        const int n = 4 + static_cast<int>(rng.below(9));
        pbound::PartialSequence x(n);
        for (int i = 1; i <= n; ++i) x.set(i, static_cast<pbound::Nuc>(rng.below(4)));
        pbound::Energy best = pbound::Energy::inf();
        double qsum = 0.0;
        pbound::enumerate_structures(x, {}, [&](const pbound::Structure& y) {
            const pbound::Energy e = pbound::structure_energy(em, y, x);
            qsum += em.boltzmann(e);
            if (e < best) best = e;
        });
        const auto fr = pbound::mfe_fold(em, x);
        const auto es = pbound::partition_function(em, x);
        const bool ok = fr.energy == best && std::abs(es.q - qsum) <= 1e-9 * qsum;
        if (!ok) {
            ++failures;
            std::cout << "[FAIL] " << x.to_string() << " dp=" << fr.energy.deci()
                      << " enum=" << best.deci() << " q=" << es.q << " qe=" << qsum << "\n";
        }
    }
    std::cout << (failures == 0 ? "[PASS] " : "[FAIL] ") << "folding oracle parity on " << trials
              << " random sequences\n";
    return failures == 0 ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pbound: probability upper bounds for RNA secondary structures"};
    app.require_subcommand(1);

    pbound::RunConfig cfg;
    std::string format = "text";

    std::string analyze_path, bench_dir, count_path, cache_action;
    int oracle_trials = 200;
    uint64_t oracle_seed = 1;

    CLI::App* analyze = app.add_subcommand("analyze", "bound one structure and show its decomposition");
    analyze->add_option("file", analyze_path, "structure file")->required();
    add_common_flags(analyze, cfg, format);

    CLI::App* bench = app.add_subcommand("bench", "bound every structure in a directory");
    bench->add_option("dir", bench_dir, "directory of structure files")->required();
    add_common_flags(bench, cfg, format);

    CLI::App* count = app.add_subcommand("count", "count decompositions explored for a structure");
    count->add_option("file", count_path, "structure file")->required();
    add_common_flags(count, cfg, format);

    CLI::App* cache = app.add_subcommand("cache", "inspect or compact a bound cache");
    cache->add_option("action", cache_action, "inspect | compact")->required();
    add_common_flags(cache, cfg, format);

    CLI::App* oracle = app.add_subcommand("oracle", "self-check folding against enumeration");
    oracle->add_option("--trials", oracle_trials, "random sequences")->capture_default_str();
    oracle->add_option("--oracle-seed", oracle_seed, "rng seed")->capture_default_str();
    add_common_flags(oracle, cfg, format);

    CLI11_PARSE(app, argc, argv);

    try {
        finalize_config(cfg, format);
    } catch (const pbound::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (analyze->parsed()) return run_analyze(analyze_path, cfg);
        if (bench->parsed()) return run_bench(bench_dir, cfg);
        if (count->parsed()) return run_count(count_path, cfg);
        if (cache->parsed()) return run_cache(cache_action, cfg);
        if (oracle->parsed()) return run_oracle(oracle_trials, oracle_seed, cfg);
    } catch (const pbound::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pbound::MissingSection& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pbound::IllegalCharacter& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const pbound::UnbalancedBrackets& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const pbound::HairpinTooSmall& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const pbound::LonelyPair& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const pbound::InputFileError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const pbound::ParseError& e) {
        // parameter files and cache lines are configuration, structure files
        // are inputs; load order above makes parameter problems surface first
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pbound::PersistenceError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pbound::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
