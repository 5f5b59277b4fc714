#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Minimal TOML subset for experiment configs: [section] headers, scalar
// keys (bool / integer / float / string) and flat homogeneous arrays,
// # comments.  Keys inside a section are addressed as "section.key".

namespace landis::toml {

struct Value {
    std::variant<bool, std::int64_t, double, std::string, std::vector<double>,
                 std::vector<std::string>>
        v;

    bool is_number() const {
        return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
    }
    double as_double() const {
        if (std::holds_alternative<std::int64_t>(v)) return (double)std::get<std::int64_t>(v);
        if (std::holds_alternative<double>(v)) return std::get<double>(v);
        throw std::runtime_error("toml: value is not a number");
    }
    std::int64_t as_int() const {
        if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
        throw std::runtime_error("toml: value is not an integer");
    }
    bool as_bool() const {
        if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
        throw std::runtime_error("toml: value is not a boolean");
    }
    const std::string& as_string() const {
        if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
        throw std::runtime_error("toml: value is not a string");
    }
    std::vector<double> as_double_array() const {
        if (std::holds_alternative<std::vector<double>>(v))
            return std::get<std::vector<double>>(v);
        if (is_number()) return {as_double()};
        throw std::runtime_error("toml: value is not a numeric array");
    }
};

class Table {
  public:
    void set(const std::string& key, Value val) { entries_[key] = std::move(val); }
    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    double number(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.as_double();
    }
    double number(const std::string& key) const { return require(key).as_double(); }
    std::int64_t integer(const std::string& key, std::int64_t fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.as_int();
    }
    bool boolean(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.as_bool();
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.as_string();
    }
    std::vector<double> numbers(const std::string& key,
                                const std::vector<double>& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.as_double_array();
    }
    const std::map<std::string, Value>& entries() const { return entries_; }

  private:
    const Value& require(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw std::runtime_error("toml: missing key '" + key + "'");
        return it->second;
    }
    std::map<std::string, Value> entries_;
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

inline Value parse_scalar(const std::string& tok) {
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return Value{tok.substr(1, tok.size() - 2)};
    // integer?
    {
        std::size_t pos = 0;
        try {
            const long long n = std::stoll(tok, &pos);
            if (pos == tok.size()) return Value{(std::int64_t)n};
        } catch (...) {}
    }
    {
        std::size_t pos = 0;
        try {
            const double x = std::stod(tok, &pos);
            if (pos == tok.size()) return Value{x};
        } catch (...) {}
    }
    throw std::runtime_error("toml: cannot parse value '" + tok + "'");
}

inline Value parse_value(const std::string& raw) {
    const std::string tok = strip(raw);
    if (tok.empty()) throw std::runtime_error("toml: empty value");
    if (tok.front() == '[') {
        if (tok.back() != ']') throw std::runtime_error("toml: unterminated array");
        std::vector<double> nums;
        std::vector<std::string> strs;
        std::string body = tok.substr(1, tok.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = strip(item);
            if (t.empty()) continue;
            const Value v = parse_scalar(t);
            if (std::holds_alternative<std::string>(v.v))
                strs.push_back(std::get<std::string>(v.v));
            else
                nums.push_back(v.as_double());
        }
        if (!strs.empty()) {
            if (!nums.empty()) throw std::runtime_error("toml: mixed array types");
            return Value{strs};
        }
        return Value{nums};
    }
    return parse_scalar(tok);
}

}  // namespace detail

inline Table parse(std::istream& in) {
    Table table;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside strings
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                line = line.substr(0, i);
                break;
            }
        }
        const std::string t = detail::strip(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("toml: bad section at line " + std::to_string(lineno));
            section = detail::strip(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value at line " +
                                     std::to_string(lineno));
        std::string key = detail::strip(t.substr(0, eq));
        if (key.empty())
            throw std::runtime_error("toml: empty key at line " + std::to_string(lineno));
        if (!section.empty()) key = section + "." + key;
        table.set(key, detail::parse_value(t.substr(eq + 1)));
    }
    return table;
}

inline Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("toml: cannot open '" + path + "'");
    return parse(in);
}

// "key=value" command-line override applied on top of a parsed table.
// Unlike the file format, bare words are accepted as strings here.
inline void apply_override(Table& table, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("override must look like key=value: '" + kv + "'");
    const std::string key = detail::strip(kv.substr(0, eq));
    const std::string raw = detail::strip(kv.substr(eq + 1));
    try {
        table.set(key, detail::parse_value(raw));
    } catch (const std::exception&) {
        table.set(key, Value{raw});
    }
}

}  // namespace landis::toml
