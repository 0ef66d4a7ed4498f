#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "covlab/distributions.hpp"
#include "covlab/errors.hpp"

namespace covlab {

/// Keys of one `[section]`. Lookups record which keys were read so unknown
/// keys can be rejected afterwards.
class ConfigSection {
 public:
  ConfigSection() = default;
  explicit ConfigSection(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key) const {
    const auto it = find(key);
    if (it == entries_.end()) throw ValidationError(key, "missing in [" + name_ + "]");
    return it->second;
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const { return detail::parse_double(get_string(key), key.c_str()); }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : (used_.insert(key), fallback);
  }

  std::int64_t get_int(const std::string& key) const { return detail::parse_int(get_string(key), key.c_str()); }
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : (used_.insert(key), fallback);
  }

  RadiusDistribution get_distribution(const std::string& key) const {
    try {
      return parse_distribution(get_string(key));
    } catch (const ValidationError& e) {
      throw ValidationError(key, e.what());
    }
  }

  /// Throws on the first key that no lookup has touched.
  void reject_unused() const {
    for (const auto& [k, v] : entries_)
      if (!used_.count(k)) throw ValidationError(k, "unknown key in [" + name_ + "]");
  }

 private:
  std::map<std::string, std::string>::const_iterator find(const std::string& key) const {
    used_.insert(key);
    return entries_.find(key);
  }

  std::string name_;
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

/// Parsed config file. Keys before the first header land in the unnamed
/// top-level section.
///
///   # comment
///   experiment = vacancy
///   seed = 42
///   [model]
///   intensity = 1.0
///   rho = degenerate(1)
struct ConfigFile {
  ConfigSection top{""};
  std::map<std::string, ConfigSection> sections;

  const ConfigSection& section(const std::string& name) const {
    static const ConfigSection empty;
    const auto it = sections.find(name);
    return it == sections.end() ? empty : it->second;
  }

  /// Sections and keys in sorted order, one `key = value` per line. Used for
  /// hashing, so formatting differences in the source do not matter.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : top.entries()) out += k + " = " + v + "\n";
    for (const auto& [name, sec] : sections) {
      out += "[" + name + "]\n";
      for (const auto& [k, v] : sec.entries()) out += k + " = " + v + "\n";
    }
    return out;
  }
};

inline ConfigFile parse_config(std::string_view text) {
  ConfigFile cfg;
  ConfigSection* current = &cfg.top;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config", where + ": unterminated section header");
      const std::string name(detail::trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ValidationError("config", where + ": empty section name");
      if (cfg.sections.count(name)) throw ValidationError("config", where + ": duplicate section [" + name + "]");
      current = &cfg.sections.emplace(name, ConfigSection(name)).first->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError("config", where + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) throw ValidationError("config", where + ": empty key");
    if (current->has(key)) throw ValidationError(key, where + ": duplicate key");
    current->set(key, std::string(detail::trim(line.substr(eq + 1))));
  }
  return cfg;
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

}  // namespace covlab
