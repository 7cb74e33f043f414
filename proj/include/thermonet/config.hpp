#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace thermonet {

/// Flat key = value configuration. File syntax: one `key = value` pair per
/// line, `#` starts a comment, blank lines ignored. CLI overrides arrive via
/// set_pair("key=value"). Getters record which keys were consumed so a typo
/// can be reported instead of silently ignored.
class KeyValueConfig {
public:
    KeyValueConfig() = default;
    static KeyValueConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    void set_pair(const std::string& key_equals_value); // parses "key=value"

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    bool was_consumed(const std::string& key) const;
    /// Throws std::invalid_argument listing any key no getter ever touched.
    void check_unused() const;

private:
    const std::string* find(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

} // namespace thermonet
