#ifndef BUBBLE_TOWER_CONFIG_HPP
#define BUBBLE_TOWER_CONFIG_HPP

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace bubble_tower {

/// Flat key=value configuration with optional [section] headers.
///
/// Keys before the first header live in the global section. Lookups take a
/// section name and fall back to the global section, so `N = 3` at the top of
/// a file applies to every command unless a section overrides it. Lines
/// starting with '#' or ';' are comments.
class Config
{
  public:
    static Config parse(const std::string& text)
    {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto s = trim(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']') {
                    throw Error(Errc::invalid_parameter,
                                "config line " + std::to_string(lineno) + ": unterminated section header");
                }
                section = trim(s.substr(1, s.size() - 2));
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw Error(Errc::invalid_parameter,
                            "config line " + std::to_string(lineno) + ": expected key=value");
            }
            cfg.set(section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        }
        return cfg;
    }

    static Config load(const std::string& path)
    {
        std::ifstream f(path);
        if (!f) throw Error(Errc::io, "cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return parse(ss.str());
    }

    void set(const std::string& section, const std::string& key, const std::string& value)
    {
        entries_[qualify(section, key)] = value;
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const
    {
        if (!section.empty()) {
            if (auto it = entries_.find(qualify(section, key)); it != entries_.end()) return it->second;
        }
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        return std::nullopt;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const
    {
        auto v = get(section, key);
        return v ? to_double(key, *v) : fallback;
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const
    {
        auto v = get(section, key);
        if (!v) return fallback;
        int out = 0;
        auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || ptr != v->data() + v->size()) {
            throw Error(Errc::invalid_parameter, "key '" + key + "' expects an integer, got '" + *v + "'");
        }
        return out;
    }

    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 std::vector<double> fallback) const
    {
        auto v = get(section, key);
        if (!v) return fallback;
        std::vector<double> out;
        std::string item;
        std::istringstream in(*v);
        while (std::getline(in, item, ',')) {
            auto t = trim(item);
            if (!t.empty()) out.push_back(to_double(key, t));
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

    static double to_double(const std::string& key, const std::string& v)
    {
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw Error(Errc::invalid_parameter, "key '" + key + "' expects a number, got '" + v + "'");
        }
    }

  private:
    static std::string qualify(const std::string& section, const std::string& key)
    {
        return section.empty() ? key : section + "." + key;
    }

    static std::string trim(const std::string& s)
    {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> entries_;
};

} // namespace bubble_tower

#endif
