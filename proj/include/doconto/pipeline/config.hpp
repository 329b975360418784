#pragma once

// Flat key = value configuration with [section] prefixes. Keys are stored as
// "section.key"; later assignments override earlier ones.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "doconto/errors.hpp"
#include "doconto/util/numfmt.hpp"

namespace doconto {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

class Config {
 public:
  static Config parse(std::istream& is, const std::string& origin = "<config>") {
    Config c;
    std::string line, section;
    std::size_t n = 0;
    while (std::getline(is, line)) {
      ++n;
      // '#' opens a comment at line start or after whitespace, so IRIs keep theirs
      for (std::size_t i = 0; i < line.size(); ++i)
        if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
          line.erase(i);
          break;
        }
      const std::string t = detail::trim(line);
      if (t.empty()) continue;
      const std::string where = origin + ":" + std::to_string(n);
      if (t.front() == '[') {
        if (t.back() != ']') throw ParameterError(where + ": unterminated section header");
        section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
        if (section.empty()) throw ParameterError(where + ": empty section name");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ParameterError(where + ": expected key = value");
      const std::string key = detail::trim(std::string_view(t).substr(0, eq));
      if (key.empty()) throw ParameterError(where + ": empty key");
      c.set(section.empty() ? key : section + "." + key, detail::trim(std::string_view(t).substr(eq + 1)));
    }
    return c;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config '" + path + "'");
    return parse(in, path);
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  // Entries of `other` win.
  void merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string get(const std::string& key, const char* fallback) const { return get(key, std::string(fallback)); }

  double get(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return util::parse_double(it->second);
    } catch (const DataError&) {
      throw ParameterError("config key '" + key + "': not a number: '" + it->second + "'");
    }
  }

  std::uint64_t get(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::uint64_t v = 0;
    const auto& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ParameterError("config key '" + key + "': not a non-negative integer: '" + s + "'");
    return v;
  }

  std::size_t get_size(const std::string& key, std::size_t fallback) const {
    return static_cast<std::size_t>(get(key, static_cast<std::uint64_t>(fallback)));
  }

  bool get(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto& v = it->second;
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ParameterError("config key '" + key + "': not a boolean: '" + v + "'");
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace doconto
