// Copyright 2026 The miesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Flat key=value configuration with [sections].
//
//   # comment
//   [experiment]
//   kind = mie-scan
//   seed = 2026
//
// Keys are unique within a section. Values run to the end of the line (or a '#') and are
// trimmed. Lists are comma separated; "a..b" expands to an inclusive integer range.

#ifndef MIESIM_CONFIG_HPP
#define MIESIM_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace miesim {

class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::size_t line, std::size_t col, const std::string &msg)
        : std::runtime_error(line ? std::to_string(line) + ":" + std::to_string(col) + ": " + msg : msg),
          line_(line),
          col_(col) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }

   private:
    std::size_t line_, col_;
};

struct ConfigValue {
    std::string text;
    std::size_t line = 0, col = 0;  // of the key, 1-based
};

class Config {
   public:
    using Section = std::map<std::string, ConfigValue>;

    static Config parse(std::istream &is) {
        Config cfg;
        std::string section;
        std::size_t lineno = 0;
        for (std::string raw; std::getline(is, raw);) {
            ++lineno;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            std::string line = raw.substr(0, raw.find('#'));
            std::size_t b = line.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            std::size_t e = line.find_last_not_of(" \t");
            if (line[b] == '[') {
                if (line[e] != ']') throw ConfigError(lineno, b + 1, "unterminated section header");
                section = trim(line.substr(b + 1, e - b - 1));
                if (!valid_name(section)) throw ConfigError(lineno, b + 2, "bad section name '" + section + "'");
                if (cfg.sections_.count(section)) throw ConfigError(lineno, b + 1, "duplicate section [" + section + "]");
                cfg.sections_[section];
                cfg.order_.push_back(section);
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(lineno, b + 1, "expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            if (!valid_name(key)) throw ConfigError(lineno, b + 1, "bad key '" + key + "'");
            if (section.empty()) throw ConfigError(lineno, b + 1, "key '" + key + "' outside any section");
            auto &sec = cfg.sections_[section];
            if (sec.count(key)) throw ConfigError(lineno, b + 1, "duplicate key '" + key + "' in [" + section + "]");
            sec[key] = {trim(line.substr(eq + 1)), lineno, b + 1};
        }
        return cfg;
    }

    static Config parse(const std::string &text) {
        std::istringstream is(text);
        return parse(is);
    }

    static Config load(const std::string &path) {
        std::ifstream f(path);
        if (!f) throw ConfigError(0, 0, "cannot open config " + path);
        return parse(f);
    }

    bool has(const std::string &section, const std::string &key) const {
        auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key);
    }

    bool has_section(const std::string &section) const { return sections_.count(section) > 0; }

    const ConfigValue &value(const std::string &section, const std::string &key) const {
        auto it = sections_.find(section);
        if (it == sections_.end()) throw ConfigError(0, 0, "missing section [" + section + "]");
        auto kt = it->second.find(key);
        if (kt == it->second.end()) throw ConfigError(0, 0, "missing key '" + key + "' in [" + section + "]");
        return kt->second;
    }

    std::string str(const std::string &section, const std::string &key) const { return value(section, key).text; }
    std::string str(const std::string &section, const std::string &key, const std::string &dflt) const {
        return has(section, key) ? str(section, key) : dflt;
    }

    std::uint64_t u64(const std::string &section, const std::string &key) const {
        const auto &v = value(section, key);
        return to_u64(v.text, v);
    }
    std::uint64_t u64(const std::string &section, const std::string &key, std::uint64_t dflt) const {
        return has(section, key) ? u64(section, key) : dflt;
    }

    bool flag(const std::string &section, const std::string &key, bool dflt) const {
        if (!has(section, key)) return dflt;
        const auto &v = value(section, key);
        if (v.text == "true" || v.text == "1" || v.text == "yes") return true;
        if (v.text == "false" || v.text == "0" || v.text == "no") return false;
        throw ConfigError(v.line, v.col, "'" + key + "' expects true or false, got '" + v.text + "'");
    }

    std::vector<std::uint64_t> u64_list(const std::string &section, const std::string &key) const {
        const auto &v = value(section, key);
        std::vector<std::uint64_t> out;
        for (const auto &item : split(v.text)) {
            auto dots = item.find("..");
            if (dots == std::string::npos) {
                out.push_back(to_u64(item, v));
                continue;
            }
            std::uint64_t lo = to_u64(item.substr(0, dots), v), hi = to_u64(item.substr(dots + 2), v);
            if (hi < lo) throw ConfigError(v.line, v.col, "empty range '" + item + "'");
            for (std::uint64_t x = lo; x <= hi; ++x) out.push_back(x);
        }
        if (out.empty()) throw ConfigError(v.line, v.col, "'" + key + "' is empty");
        return out;
    }

    std::vector<std::string> str_list(const std::string &section, const std::string &key) const {
        auto out = split(value(section, key).text);
        if (out.empty()) {
            const auto &v = value(section, key);
            throw ConfigError(v.line, v.col, "'" + key + "' is empty");
        }
        return out;
    }

    /// Rejects sections and keys outside `schema`, reporting the first by position.
    void check_schema(const std::map<std::string, std::set<std::string>> &schema) const {
        for (const auto &name : order_) {
            auto it = schema.find(name);
            const auto &sec = sections_.at(name);
            if (it == schema.end()) {
                std::size_t line = sec.empty() ? 0 : sec.begin()->second.line;
                throw ConfigError(line, 1, "unknown section [" + name + "]");
            }
            const ConfigValue *worst = nullptr;
            std::string worst_key;
            for (const auto &[k, v] : sec) {
                if (it->second.count(k)) continue;
                if (!worst || v.line < worst->line) worst = &v, worst_key = k;
            }
            if (worst) throw ConfigError(worst->line, worst->col, "unknown key '" + worst_key + "' in [" + name + "]");
        }
    }

    /// Canonical key=value echo in section order.
    std::map<std::string, std::map<std::string, std::string>> echo() const {
        std::map<std::string, std::map<std::string, std::string>> out;
        for (const auto &[s, sec] : sections_)
            for (const auto &[k, v] : sec) out[s][k] = v.text;
        return out;
    }

    void set(const std::string &section, const std::string &key, const std::string &text) {
        if (!sections_.count(section)) order_.push_back(section);
        sections_[section][key] = {text, 0, 0};
    }

   private:
    std::map<std::string, Section> sections_;
    std::vector<std::string> order_;

    static std::string trim(const std::string &s) {
        std::size_t b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return "";
        return s.substr(b, s.find_last_not_of(" \t") - b + 1);
    }

    static bool valid_name(const std::string &s) {
        if (s.empty()) return false;
        for (char c : s)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
        return true;
    }

    static std::vector<std::string> split(const std::string &s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        for (std::string item; std::getline(ss, item, ',');) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    static std::uint64_t to_u64(const std::string &s, const ConfigValue &where) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError(where.line, where.col, "expected a non-negative integer, got '" + s + "'");
        }
        try {
            return std::stoull(s);
        } catch (const std::out_of_range &) {
            throw ConfigError(where.line, where.col, "integer out of range: '" + s + "'");
        }
    }
};

}  // namespace miesim

#endif
