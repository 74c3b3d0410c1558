#include "mmudn/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mmudn {
namespace {

std::string trim(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    std::size_t end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    std::istringstream stream(text);
    while (std::getline(stream, current, ',')) {
        std::string token = trim(current);
        if (!token.empty()) parts.push_back(token);
    }
    return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* wanted) {
    throw std::runtime_error("config key '" + key + "': expected " + wanted +
                             ", got '" + value + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig config;
    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": expected 'key = value', got '" + stripped + "'");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": empty key");
        }
        config.values_[key] = value;
    }
    return config;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_string(buffer.str());
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        double value = std::stod(it->second, &used);
        if (used != it->second.size()) bad_value(key, it->second, "a number");
        return value;
    } catch (const std::invalid_argument&) {
        bad_value(key, it->second, "a number");
    } catch (const std::out_of_range&) {
        bad_value(key, it->second, "a representable number");
    }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        long long value = std::stoll(it->second, &used);
        if (used != it->second.size()) bad_value(key, it->second, "an integer");
        return value;
    } catch (const std::invalid_argument&) {
        bad_value(key, it->second, "an integer");
    } catch (const std::out_of_range&) {
        bad_value(key, it->second, "a representable integer");
    }
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key,
                                         std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        unsigned long long value = std::stoull(it->second, &used);
        if (used != it->second.size() || it->second.front() == '-') {
            bad_value(key, it->second, "an unsigned integer");
        }
        return value;
    } catch (const std::invalid_argument&) {
        bad_value(key, it->second, "an unsigned integer");
    } catch (const std::out_of_range&) {
        bad_value(key, it->second, "a representable unsigned integer");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string lowered = it->second;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lowered == "1" || lowered == "true" || lowered == "yes" || lowered == "on") {
        return true;
    }
    if (lowered == "0" || lowered == "false" || lowered == "no" || lowered == "off") {
        return false;
    }
    bad_value(key, it->second, "a boolean");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    std::vector<double> values;
    for (const std::string& token : split_commas(it->second)) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) bad_value(key, token, "a number list");
        } catch (const std::logic_error&) {
            bad_value(key, token, "a number list");
        }
    }
    return values;
}

std::vector<std::pair<int, int>> KeyValueConfig::get_pairs(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    std::vector<std::pair<int, int>> pairs;
    for (const std::string& token : split_commas(it->second)) {
        std::size_t x = token.find_first_of("xX");
        if (x == std::string::npos || x == 0 || x + 1 >= token.size()) {
            bad_value(key, token, "pairs like 2x250");
        }
        try {
            int first = std::stoi(trim(token.substr(0, x)));
            int second = std::stoi(trim(token.substr(x + 1)));
            pairs.emplace_back(first, second);
        } catch (const std::logic_error&) {
            bad_value(key, token, "pairs like 2x250");
        }
    }
    return pairs;
}

std::string format_sig(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    char buffer[64];
    double magnitude = std::abs(value);
    int exponent = static_cast<int>(std::floor(std::log10(magnitude)));
    if (exponent > 20 || exponent < -12) {
        // Out of sensible fixed-decimal range; fall back to general form.
        std::snprintf(buffer, sizeof(buffer), "%.6g", value);
        return buffer;
    }
    int decimals = 5 - exponent;
    if (decimals >= 0) {
        std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    } else {
        double scale = std::pow(10.0, -decimals);
        std::snprintf(buffer, sizeof(buffer), "%.0f", std::round(value / scale) * scale);
    }
    return buffer;
}

}  // namespace mmudn
