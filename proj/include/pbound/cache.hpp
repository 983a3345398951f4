#pragma once

// Persistent motif-bound cache. Each motif bound is computed once and cached
// under its canonical key; entries are valid only while the parameter digest
// matches. Persistence is JSON-lines, append-only with compaction on load.

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "pbound/common.hpp"
#include "pbound/energy_model.hpp"
#include "pbound/record.hpp"

namespace pbound {

// Knobs that change bound values; they feed the digest guarding the cache.
struct BoundParams {
    int exact_len_cap = 14;
    int samples = 100;
    uint64_t seed = 1;
    uint64_t max_assignments = kDefaultAssignmentCap;
    int retries = 1;
    int min_hairpin = 3;
};

inline std::string params_hash(const EnergyModel& em, const BoundParams& bp) {
    std::ostringstream os;
    os << model_fingerprint(em) << '|' << bp.exact_len_cap << '|' << bp.samples << '|' << bp.seed
       << '|' << bp.max_assignments << '|' << bp.retries << '|' << bp.min_hairpin;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(os.str())));
    return std::string(buf);
}

inline nlohmann::json record_to_json(const PBoundRecord& r) {
    nlohmann::json j;
    j["key"] = r.key;
    j["pbound"] = r.pbound;
    j["method"] = to_string(r.method);
    if (r.ddg_max)
        j["ddg_max"] = *r.ddg_max;
    else
        j["ddg_max"] = nullptr;
    j["rival_count"] = r.rival_count;
    j["umfe_undesignable"] = r.umfe_undesignable;
    j["params_hash"] = r.params_hash;
    return j;
}

inline PBoundRecord record_from_json(const nlohmann::json& j) {
    PBoundRecord r;
    r.key = j.at("key").get<std::string>();
    r.pbound = j.at("pbound").get<double>();
    r.method = bound_method_from_string(j.at("method").get<std::string>());
    if (j.contains("ddg_max") && !j.at("ddg_max").is_null()) r.ddg_max = j.at("ddg_max").get<double>();
    r.rival_count = j.at("rival_count").get<int>();
    r.umfe_undesignable = j.at("umfe_undesignable").get<bool>();
    r.params_hash = j.at("params_hash").get<std::string>();
    return r;
}

class BoundCache {
  public:
    BoundCache() = default;  // in-memory only

    explicit BoundCache(std::string path) : path_(std::move(path)) {
        if (path_.empty()) return;
        load();
        append_.open(path_, std::ios::app);
        if (!append_) throw PersistenceError("cannot open cache for writing: " + path_);
    }

    std::optional<PBoundRecord> get(const std::string& key, const std::string& hash) const {
        std::shared_lock lock(mu_);
        auto it = entries_.find(key);
        if (it == entries_.end() || it->second.params_hash != hash) return std::nullopt;
        return it->second;
    }

    void put(const PBoundRecord& rec) {
        std::unique_lock lock(mu_);
        entries_[rec.key] = rec;
        if (append_.is_open()) {
            append_ << record_to_json(rec).dump() << '\n';
            append_.flush();
            if (!append_) throw PersistenceError("cache write failed: " + path_);
        }
    }

    size_t size() const {
        std::shared_lock lock(mu_);
        return entries_.size();
    }

    const std::string& path() const { return path_; }

    // Rewrites the file with one line per live entry.
    void compact() {
        std::unique_lock lock(mu_);
        if (path_.empty()) return;
        append_.close();
        std::ofstream out(path_, std::ios::trunc);
        if (!out) throw PersistenceError("cannot rewrite cache: " + path_);
        for (const auto& [key, rec] : entries_) out << record_to_json(rec).dump() << '\n';
        out.close();
        append_.open(path_, std::ios::app);
        if (!append_) throw PersistenceError("cannot reopen cache: " + path_);
    }

  private:
    void load() {
        std::ifstream in(path_);
        if (!in) return;  // first run
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                entries_[nlohmann::json::parse(line).at("key").get<std::string>()] =
                    record_from_json(nlohmann::json::parse(line));
            } catch (const std::exception& e) {
                throw PersistenceError(path_ + ":" + std::to_string(lineno) +
                                       ": bad cache line: " + e.what());
            }
        }
    }

    std::string path_;
    std::unordered_map<std::string, PBoundRecord> entries_;
    mutable std::shared_mutex mu_;
    std::ofstream append_;
};

inline std::optional<PBoundRecord> cache_get(const BoundCache& cache, const std::string& key,
                                             const std::string& hash) {
    return cache.get(key, hash);
}

inline void cache_put(BoundCache& cache, const PBoundRecord& rec) { cache.put(rec); }

}  // namespace pbound
