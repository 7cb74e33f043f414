#include "thermonet/config.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

namespace thermonet {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    KeyValueConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        config.values_[key] = value;
    }
    return config;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void KeyValueConfig::set_pair(const std::string& key_equals_value) {
    const auto eq = key_equals_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("expected key=value, got: " + key_equals_value);
    const std::string key = trim(key_equals_value.substr(0, eq));
    const std::string value = trim(key_equals_value.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("empty key in: " + key_equals_value);
    values_[key] = value;
}

const std::string* KeyValueConfig::find(const std::string& key) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

bool KeyValueConfig::has(const std::string& key) const {
    return find(key) != nullptr;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "inf" || *v == "infinite") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double parsed = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not a number: " + *v);
    }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const long long parsed = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not an integer: " + *v);
    }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const unsigned long long parsed = std::stoull(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not an unsigned integer: " + *v);
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "on" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "off" || *v == "0" || *v == "no") return false;
    throw std::invalid_argument("config key '" + key + "': not a boolean: " + *v);
}

bool KeyValueConfig::was_consumed(const std::string& key) const {
    return consumed_.count(key) > 0;
}

void KeyValueConfig::check_unused() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (consumed_.count(key)) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += key;
    }
    if (!unknown.empty())
        throw std::invalid_argument("unrecognized config keys: " + unknown);
}

} // namespace thermonet
