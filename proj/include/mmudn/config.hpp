#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mmudn {

// Flat key-value configuration file: one `key = value` per line, `#`
// comments, blank lines ignored. Values are parsed on demand; unknown keys
// are rejected by the readers in experiments.cpp so typos fail loudly.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list of numbers, e.g. "100,150,200".
    std::vector<double> get_list(const std::string& key) const;
    // Comma-separated list of MxL pairs, e.g. "2x250,4x125".
    std::vector<std::pair<int, int>> get_pairs(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

// Formats a number with 6 significant digits (the project-wide CSV format).
std::string format_sig(double value);

}  // namespace mmudn
