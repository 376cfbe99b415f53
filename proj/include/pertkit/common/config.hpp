#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pertkit {

// Plain-text key/value configuration. Lines are "key = value"; '#' starts a
// comment. Flags override file values by calling set() after load.
class Config {
public:
    Config() = default;

    static Config load_file(const std::string& path);
    static Config parse(const std::string& text, const std::string& origin);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Required variants throw ConfigError when the key is absent.
    std::string require(const std::string& key) const;

    std::vector<long long> get_int_list(const std::string& key,
                                        const std::vector<long long>& fallback) const;

    // Stable hash over the sorted key=value set. Recorded in manifests and
    // run state; a resume with a different hash is refused.
    std::string hash() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace pertkit
