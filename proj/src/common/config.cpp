#include "pertkit/common/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "pertkit/common/errors.hpp"
#include "pertkit/common/hash.hpp"
#include "pertkit/common/tsv.hpp"

namespace pertkit {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load_file(const std::string& path) {
    try {
        return parse(read_text_file(path), path);
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) {
            line = line.substr(0, hash_pos);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

bool Config::has(const std::string& key) const {
    return entries_.count(key) > 0;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    long long v = 0;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("config key '" + key + "': not an integer: '" + s + "'");
    }
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    double v = 0;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("config key '" + key + "': not a number: '" + s + "'");
    }
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    const std::string& s = it->second;
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    throw ConfigError("config key '" + key + "': not a boolean: '" + s + "'");
}

std::string Config::require(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ConfigError("missing required config key '" + key + "'");
    }
    return it->second;
}

std::vector<long long> Config::get_int_list(const std::string& key,
                                            const std::vector<long long>& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    std::vector<long long> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
        long long v = 0;
        std::string t = trim(item);
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw ConfigError("config key '" + key + "': bad integer list element '" + t + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::string Config::hash() const {
    // Operational knobs that cannot change results stay out of the hash, so
    // a resume is not refused over a dropped recording flag or a different
    // worker cap.
    static const std::set<std::string> operational = {"record_script", "audit_prompts",
                                                      "workers", "inflight_cap"};
    Fnv64 h;
    for (const auto& [k, v] : entries_) {  // std::map iterates sorted
        if (operational.count(k)) {
            continue;
        }
        h.update(k).update("=").update(v).update("\n");
    }
    return to_hex64(h.value());
}

}  // namespace pertkit
