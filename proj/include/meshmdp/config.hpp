#pragma once

// Flat key-value configuration:
//
//   # comment
//   [section]
//   key = value        # trailing comments allowed
//
// Keys are addressed as "section.key".  Every key must be declared in the
// schema; unknown keys are errors.  Precedence: schema default < file <
// environment (MESHMDP_SECTION_KEY) < explicit overrides (--set).

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "meshmdp/errors.hpp"

namespace meshmdp {

struct ConfigError : std::runtime_error {
  ConfigError(std::string source, std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(format(source, line, column, what)),
        source(std::move(source)), line(line), column(column) {}

  std::string source;
  std::size_t line = 0;    // 1-based, 0 if not from a file
  std::size_t column = 0;  // 1-based

 private:
  static std::string format(const std::string& source, std::size_t line, std::size_t column,
                            const std::string& what) {
    std::string out = source;
    if (line > 0) out += ":" + std::to_string(line) + ":" + std::to_string(column);
    return out + ": " + what;
  }
};

struct ConfigKey {
  std::string name;  // section.key
  std::string default_value;
  std::string doc;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline std::string env_name(std::string_view key) {
  std::string out = "MESHMDP_";
  for (char c : key)
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

class Config {
 public:
  struct Entry {
    std::string value;
    std::string source = "default";
    std::size_t line = 0;
    std::size_t column = 0;
  };

  explicit Config(std::vector<ConfigKey> schema) : schema_(std::move(schema)) {
    for (const auto& k : schema_) entries_[k.name] = Entry{k.default_value};
  }

  const std::vector<ConfigKey>& schema() const noexcept { return schema_; }

  bool known(std::string_view key) const { return entries_.count(std::string(key)) > 0; }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, 0, "cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    load_text(buf.str(), path);
  }

  void load_text(std::string_view text, const std::string& source) {
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto eol = text.find('\n', pos);
      const std::string_view raw =
          text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;

      std::string_view line = raw;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      const std::string_view body = detail::trim(line);
      if (body.empty()) continue;
      const std::size_t col = static_cast<std::size_t>(body.data() - raw.data()) + 1;

      if (body.front() == '[') {
        if (body.back() != ']')
          throw ConfigError(source, line_no, col, "unterminated section header");
        const auto name = detail::trim(body.substr(1, body.size() - 2));
        if (!detail::valid_identifier(name))
          throw ConfigError(source, line_no, col + 1, "invalid section name '" + std::string(name) + "'");
        section = std::string(name);
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(source, line_no, col, "expected 'key = value'");
      const auto key = detail::trim(body.substr(0, eq));
      if (!detail::valid_identifier(key))
        throw ConfigError(source, line_no, col, "invalid key '" + std::string(key) + "'");
      if (section.empty())
        throw ConfigError(source, line_no, col, "key '" + std::string(key) + "' outside any [section]");
      const std::string full = section + "." + std::string(key);
      if (!known(full)) throw ConfigError(source, line_no, col, "unknown key '" + full + "'");
      const auto value = detail::trim(body.substr(eq + 1));
      const std::size_t vcol = value.empty()
                                   ? col + eq + 1
                                   : static_cast<std::size_t>(value.data() - raw.data()) + 1;
      entries_[full] = Entry{std::string(value), source, line_no, vcol};
    }
  }

  // Reads MESHMDP_SECTION_KEY for every schema key.
  void apply_environment() {
    for (const auto& k : schema_) {
      const std::string name = detail::env_name(k.name);
      if (const char* v = std::getenv(name.c_str()))
        entries_[k.name] = Entry{std::string(detail::trim(v)), "env " + name};
    }
  }

  // "section.key=value"
  void apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("--set", 0, 0, "expected section.key=value, got '" + std::string(assignment) + "'");
    const std::string key(detail::trim(assignment.substr(0, eq)));
    if (!known(key)) throw ConfigError("--set", 0, 0, "unknown key '" + key + "'");
    entries_[key] = Entry{std::string(detail::trim(assignment.substr(eq + 1))), "--set"};
  }

  void set(const std::string& key, std::string value, std::string source) {
    if (!known(key)) throw ConfigError(source, 0, 0, "unknown key '" + key + "'");
    entries_[key] = Entry{std::move(value), std::move(source)};
  }

  const Entry& entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("config", 0, 0, "undeclared key '" + key + "'");
    return it->second;
  }

  const std::string& raw(const std::string& key) const { return entry(key).value; }

  // Sorted key -> value dump of every schema key.
  std::map<std::string, std::string> resolved() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, e] : entries_) out[k] = e.value;
    return out;
  }

  std::string get_string(const std::string& key) const { return raw(key); }

  std::string get_choice(const std::string& key, const std::vector<std::string>& allowed) const {
    const std::string& v = raw(key);
    for (const auto& a : allowed)
      if (v == a) return v;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    fail(key, "expected one of {" + list + "}, got '" + v + "'");
  }

  double get_double(const std::string& key) const { return parse_double(key, raw(key)); }

  std::uint64_t get_u64(const std::string& key) const { return parse_u64(key, raw(key)); }

  std::size_t get_size(const std::string& key) const {
    return static_cast<std::size_t>(get_u64(key));
  }

  bool get_bool(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(key, "expected a boolean, got '" + v + "'");
  }

  // Comma-separated; the empty string is the empty list.
  std::vector<double> get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(raw(key))) out.push_back(parse_double(key, item));
    return out;
  }

  std::vector<std::size_t> get_sizes(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split(raw(key)))
      out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const Entry& e = entry(key);
    throw ConfigError(e.source, e.line, e.column, key + ": " + what);
  }

 private:
  static std::vector<std::string> split(std::string_view s) {
    std::vector<std::string> out;
    if (detail::trim(s).empty()) return out;
    std::size_t pos = 0;
    while (true) {
      const auto comma = s.find(',', pos);
      out.emplace_back(detail::trim(s.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  double parse_double(const std::string& key, std::string_view text) const {
    const std::string_view t = detail::trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || end != t.data() + t.size() || std::isnan(v))
      fail(key, "expected a number, got '" + std::string(t) + "'");
    return v;
  }

  std::uint64_t parse_u64(const std::string& key, std::string_view text) const {
    const std::string_view t = detail::trim(text);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || end != t.data() + t.size())
      fail(key, "expected a nonnegative integer, got '" + std::string(t) + "'");
    return v;
  }

  std::vector<ConfigKey> schema_;
  std::map<std::string, Entry> entries_;
};

}  // namespace meshmdp
