#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "radqec/noise.hpp"
#include "radqec/surface_code.hpp"

namespace radqec {

// Flat key=value scenario file. '#' starts a comment, blank lines are
// skipped, keys are unique. Reads mark keys as consumed so a scenario can
// reject configs with unknown entries.
class ConfigMap {
   public:
    ConfigMap() = default;

    static ConfigMap from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str(), path);
    }

    static ConfigMap from_string(const std::string& text, const std::string& origin = "<string>") {
        ConfigMap m;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config: " + origin + ":" + std::to_string(lineno) +
                                         ": expected key=value, got '" + t + "'");
            std::string key = trim(t.substr(0, eq));
            std::string val = trim(t.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error("config: " + origin + ":" + std::to_string(lineno) + ": empty key");
            if (m.entries_.count(key))
                throw std::runtime_error("config: " + origin + ":" + std::to_string(lineno) +
                                         ": duplicate key '" + key + "'");
            m.entries_[key] = {val, false};
        }
        return m;
    }

    // Insert or overwrite (CLI flags override file values).
    void set(const std::string& key, const std::string& value) { entries_[key] = {value, false}; }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.consumed = true;
        return it->second.value;
    }

    std::optional<std::string> get_optional(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.consumed = true;
        return it->second.value;
    }

    int64_t get_int(const std::string& key, int64_t fallback) {
        auto raw = get_optional(key);
        if (!raw) return fallback;
        return parse_int(key, *raw);
    }

    uint64_t get_uint(const std::string& key, uint64_t fallback) {
        auto raw = get_optional(key);
        if (!raw) return fallback;
        return parse_uint(key, *raw);
    }

    double get_double(const std::string& key, double fallback) {
        auto raw = get_optional(key);
        if (!raw) return fallback;
        return parse_double(key, *raw);
    }

    bool get_bool(const std::string& key, bool fallback) {
        auto raw = get_optional(key);
        if (!raw) return fallback;
        if (*raw == "true" || *raw == "on" || *raw == "1") return true;
        if (*raw == "false" || *raw == "off" || *raw == "0") return false;
        throw std::runtime_error("config: key '" + key + "': expected boolean, got '" + *raw + "'");
    }

    // Comma-separated list; empty string yields the fallback.
    std::vector<std::string> get_list(const std::string& key, std::vector<std::string> fallback) {
        auto raw = get_optional(key);
        if (!raw || trim(*raw).empty()) return fallback;
        std::vector<std::string> out;
        std::istringstream in(*raw);
        std::string item;
        while (std::getline(in, item, ',')) {
            std::string t = trim(item);
            if (t.empty())
                throw std::runtime_error("config: key '" + key + "': empty list element");
            out.push_back(t);
        }
        return out;
    }

    std::vector<int32_t> get_int_list(const std::string& key, std::vector<int32_t> fallback) {
        auto items = get_list(key, {});
        if (items.empty()) return fallback;
        std::vector<int32_t> out;
        for (const auto& s : items) out.push_back(static_cast<int32_t>(parse_int(key, s)));
        return out;
    }

    // Keys never read by any getter — typos in a scenario file.
    std::vector<std::string> unconsumed() const {
        std::vector<std::string> out;
        for (const auto& [k, e] : entries_)
            if (!e.consumed) out.push_back(k);
        return out;
    }

    void require_fully_consumed() const {
        auto left = unconsumed();
        if (left.empty()) return;
        std::string msg = "config: unknown key(s):";
        for (const auto& k : left) msg += " '" + k + "'";
        throw std::runtime_error(msg);
    }

    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

   private:
    struct Entry {
        std::string value;
        bool consumed = false;
    };

    static int64_t parse_int(const std::string& key, const std::string& raw) {
        try {
            size_t pos = 0;
            int64_t v = std::stoll(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "': expected integer, got '" + raw + "'");
        }
    }

    static uint64_t parse_uint(const std::string& key, const std::string& raw) {
        try {
            size_t pos = 0;
            uint64_t v = std::stoull(raw, &pos);
            if (pos != raw.size() || raw.find('-') != std::string::npos) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "': expected unsigned integer, got '" + raw + "'");
        }
    }

    static double parse_double(const std::string& key, const std::string& raw) {
        try {
            size_t pos = 0;
            double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "': expected number, got '" + raw + "'");
        }
    }

    std::map<std::string, Entry> entries_;
};

enum class DecoderKind : uint8_t { Mwpm, UnionFind, RadMatching };

inline std::string decoder_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::Mwpm: return "mwpm";
        case DecoderKind::UnionFind: return "union_find";
        case DecoderKind::RadMatching: return "radmatching";
    }
    throw std::logic_error("decoder_name: bad enum");
}

inline DecoderKind decoder_from_name(const std::string& s) {
    if (s == "mwpm") return DecoderKind::Mwpm;
    if (s == "union_find") return DecoderKind::UnionFind;
    if (s == "radmatching") return DecoderKind::RadMatching;
    throw std::runtime_error("config: unknown decoder '" + s +
                             "' (expected mwpm, union_find or radmatching)");
}

// Fully-resolved scenario parameters shared by every runner. `shots == 0`
// means "fill the time horizon"; `rounds == 0` means "rounds = distance".
struct ScenarioConfig {
    std::vector<int32_t> distances;
    int32_t rounds = 0;
    Basis basis = Basis::Z;
    bool both_bases = false;
    double p = 1e-5;
    std::vector<std::string> loci;
    bool radiation = true;
    double t_rad = 0.0;
    double dt_rad = 1e-3;
    double tau1 = kTau1;
    int32_t sequences = 128;
    int32_t shots = 0;
    double horizon = 1e-3;
    std::vector<DecoderKind> decoders;
    uint64_t seed = 0;
    std::string out_dir = "out";
    int32_t threads = 1;
    int32_t k_max = 20;
};

// Per-scenario fallbacks; the keys themselves are common to all scenarios.
struct ScenarioDefaults {
    std::vector<int32_t> distances;
    std::vector<std::string> loci;
    std::vector<std::string> decoders;
    std::string basis = "Z";
    int32_t sequences = 128;
};

inline ScenarioConfig scenario_from(ConfigMap& m, const ScenarioDefaults& defaults) {
    ScenarioConfig c;
    c.distances = m.get_int_list("distances", defaults.distances);
    if (c.distances.empty()) throw std::runtime_error("config: 'distances' must be non-empty");
    for (int32_t d : c.distances)
        if (d < 3 || d % 2 == 0)
            throw std::runtime_error("config: distance " + std::to_string(d) + " must be odd and >= 3");

    c.rounds = static_cast<int32_t>(m.get_int("rounds", 0));
    if (c.rounds < 0) throw std::runtime_error("config: 'rounds' must be >= 0 (0 = distance)");

    std::string basis = m.get_string("basis", defaults.basis);
    if (basis == "Z" || basis == "z") {
        c.basis = Basis::Z;
    } else if (basis == "X" || basis == "x") {
        c.basis = Basis::X;
    } else if (basis == "both") {
        c.basis = Basis::Z;
        c.both_bases = true;
    } else {
        throw std::runtime_error("config: 'basis' must be Z, X or both, got '" + basis + "'");
    }

    c.p = m.get_double("p", 1e-5);
    if (!(c.p >= 0.0 && c.p <= 0.1))
        throw std::runtime_error("config: 'p' must lie in [0, 0.1]");

    c.loci = m.get_list("loci", defaults.loci);
    if (c.loci.empty()) throw std::runtime_error("config: 'loci' must be non-empty");

    c.radiation = m.get_bool("radiation", true);
    c.t_rad = m.get_double("t_rad", 0.0);
    if (c.t_rad < 0.0) throw std::runtime_error("config: 't_rad' must be >= 0");
    c.dt_rad = m.get_double("dt_rad", 1e-3);
    if (!(c.dt_rad > 0.0)) throw std::runtime_error("config: 'dt_rad' must be > 0");
    c.tau1 = m.get_double("tau1", kTau1);
    if (!(c.tau1 > 0.0)) throw std::runtime_error("config: 'tau1' must be > 0");

    c.sequences = static_cast<int32_t>(m.get_int("sequences", defaults.sequences));
    if (c.sequences < 1) throw std::runtime_error("config: 'sequences' must be >= 1");
    c.shots = static_cast<int32_t>(m.get_int("shots", 0));
    if (c.shots < 0) throw std::runtime_error("config: 'shots' must be >= 0 (0 = fill horizon)");
    c.horizon = m.get_double("horizon", 1e-3);
    if (!(c.horizon > 0.0)) throw std::runtime_error("config: 'horizon' must be > 0");

    std::vector<std::string> dec = m.get_list("decoders", defaults.decoders);
    for (const auto& name : dec) {
        DecoderKind k = decoder_from_name(name);
        if (std::find(c.decoders.begin(), c.decoders.end(), k) != c.decoders.end())
            throw std::runtime_error("config: duplicate decoder '" + name + "'");
        c.decoders.push_back(k);
    }

    auto seed = m.get_optional("seed");
    if (!seed) throw std::runtime_error("config: 'seed' is required");
    {
        size_t pos = 0;
        try {
            c.seed = std::stoull(*seed, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != seed->size())
            throw std::runtime_error("config: 'seed' must be an unsigned integer, got '" + *seed + "'");
    }

    c.out_dir = m.get_string("out", "out");
    c.threads = static_cast<int32_t>(m.get_int("threads", 1));
    if (c.threads < 1) throw std::runtime_error("config: 'threads' must be >= 1");
    c.k_max = static_cast<int32_t>(m.get_int("k_max", 20));
    if (c.k_max < 1) throw std::runtime_error("config: 'k_max' must be >= 1");

    m.require_fully_consumed();
    return c;
}

}  // namespace radqec
