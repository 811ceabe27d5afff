#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cimclg {

// One `key = value` line; `section` is the enclosing [header] (may be empty).
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

// Flat INI-like text: [section] headers, `key = value` lines, `#`
// comments. Keys may repeat; scalar lookups take the last occurrence.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text, std::string origin = "<string>");
  static ConfigFile load(const std::filesystem::path& path);

  // Lookups use the qualified name "section.key" (or just "key" for
  // entries before the first header).
  std::optional<std::string> get(const std::string& qualified) const;
  std::vector<std::string> get_all(const std::string& qualified) const;
  bool has(const std::string& qualified) const { return get(qualified).has_value(); }

  // Replaces every occurrence of the key (appends when absent).
  void set(const std::string& qualified, const std::string& value);

  const std::vector<ConfigEntry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

  // Canonical text, one "section.key = value" line per entry in file order.
  std::string echo() const;

 private:
  std::vector<ConfigEntry> entries_;
  std::string origin_;
};

std::string qualified_name(const ConfigEntry& e);

// Value parsers; `key` only goes into the error text.
double parse_real(const std::string& key, const std::string& text);
std::size_t parse_natural(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
std::vector<std::string> split_list(const std::string& text, char sep = ',');
std::vector<double> parse_real_list(const std::string& key, const std::string& text);
std::vector<std::size_t> parse_natural_list(const std::string& key, const std::string& text);

}  // namespace cimclg
