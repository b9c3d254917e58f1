#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "amphough/errors.hpp"

namespace amphough {

/**
 * Flat `key = value` configuration with repeatable `[section]` blocks.
 * Keys before the first section header are global. Lines starting with
 * '#' are comments. Every entry remembers its line number so malformed
 * values can be reported by line and field.
 */
struct ConfigEntry {
    std::string value;
    int line = 0;
};

struct ConfigSection {
    std::string name;
    int line = 0;
    std::map<std::string, ConfigEntry> entries;
};

struct Config {
    std::map<std::string, ConfigEntry> globals;
    std::vector<ConfigSection> sections;
};

namespace detail {
inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
} // namespace detail

inline Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    ConfigSection* current = nullptr;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("config line " + std::to_string(line_no) + ": unterminated section header");
            const std::string name = detail::trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw ParseError("config line " + std::to_string(line_no) + ": empty section name");
            cfg.sections.push_back({name, line_no, {}});
            current = &cfg.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        auto& scope = current ? current->entries : cfg.globals;
        if (scope.count(key))
            throw ParseError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        scope[key] = {value, line_no};
    }
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Typed lookup over one key/value scope with line-and-field diagnostics.
class KvReader {
  public:
    KvReader(const std::map<std::string, ConfigEntry>& entries, std::string scope)
        : entries_(&entries), scope_(std::move(scope)) {}

    bool has(const std::string& key) const { return entries_->count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const ConfigEntry* e = find(key);
        if (!e) throw ParseError(scope_ + ": missing key '" + key + "'");
        return e->value;
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        const ConfigEntry* e = find(key);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& key) const { return parse_double(key, require(key)); }
    double get_double(const std::string& key, double fallback) const {
        const ConfigEntry* e = find(key);
        return e ? parse_double(key, *e) : fallback;
    }

    long get_int(const std::string& key) const { return parse_int(key, require(key)); }
    long get_int(const std::string& key, long fallback) const {
        const ConfigEntry* e = find(key);
        return e ? parse_int(key, *e) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const ConfigEntry* e = find(key);
        if (!e) return fallback;
        if (e->value == "true" || e->value == "1") return true;
        if (e->value == "false" || e->value == "0") return false;
        throw ParseError(field_context(key, *e) + ": expected true/false");
    }

  private:
    const ConfigEntry* find(const std::string& key) const {
        const auto it = entries_->find(key);
        return it == entries_->end() ? nullptr : &it->second;
    }
    const ConfigEntry& require(const std::string& key) const {
        const ConfigEntry* e = find(key);
        if (!e) throw ParseError(scope_ + ": missing key '" + key + "'");
        return *e;
    }
    std::string field_context(const std::string& key, const ConfigEntry& e) const {
        return scope_ + " line " + std::to_string(e.line) + ", key '" + key + "'";
    }
    double parse_double(const std::string& key, const ConfigEntry& e) const {
        try {
            std::size_t pos = 0;
            const double v = std::stod(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument(e.value);
            return v;
        } catch (const std::exception&) {
            throw ParseError(field_context(key, e) + ": not a number ('" + e.value + "')");
        }
    }
    long parse_int(const std::string& key, const ConfigEntry& e) const {
        try {
            std::size_t pos = 0;
            const long v = std::stol(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument(e.value);
            return v;
        } catch (const std::exception&) {
            throw ParseError(field_context(key, e) + ": not an integer ('" + e.value + "')");
        }
    }

    const std::map<std::string, ConfigEntry>* entries_;
    std::string scope_;
};

} // namespace amphough
