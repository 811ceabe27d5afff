#include "cimclg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cimclg/errors.hpp"

namespace cimclg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(std::string_view s) {
  const auto pos = s.find('#');
  return trim(pos == std::string_view::npos ? s : s.substr(0, pos));
}

}  // namespace

std::string qualified_name(const ConfigEntry& e) { return e.section.empty() ? e.key : e.section + "." + e.key; }

ConfigFile ConfigFile::parse(std::string_view text, std::string origin) {
  ConfigFile cfg;
  cfg.origin_ = std::move(origin);
  std::string section;
  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    const std::string line = strip_comment(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(cfg.origin_ + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(cfg.origin_ + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(cfg.origin_ + ":" + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
    ConfigEntry e{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                  lineno};
    if (e.key.empty()) throw ConfigError(cfg.origin_ + ":" + std::to_string(lineno) + ": missing key");
    cfg.entries_.push_back(std::move(e));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> ConfigFile::get(const std::string& qualified) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (qualified_name(*it) == qualified) return it->value;
  return std::nullopt;
}

std::vector<std::string> ConfigFile::get_all(const std::string& qualified) const {
  std::vector<std::string> out;
  for (const auto& e : entries_)
    if (qualified_name(e) == qualified) out.push_back(e.value);
  return out;
}

void ConfigFile::set(const std::string& qualified, const std::string& value) {
  std::erase_if(entries_, [&](const ConfigEntry& e) { return qualified_name(e) == qualified; });
  ConfigEntry e;
  const auto dot = qualified.rfind('.');
  if (dot != std::string::npos) {
    e.section = qualified.substr(0, dot);
    e.key = qualified.substr(dot + 1);
  } else {
    e.key = qualified;
  }
  e.value = value;
  entries_.push_back(std::move(e));
}

std::string ConfigFile::echo() const {
  std::string out;
  for (const auto& e : entries_) out += qualified_name(e) + " = " + e.value + "\n";
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("key '" + key + "': expected a real number, got '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError("key '" + key + "': value must be finite");
  return v;
}

std::size_t parse_natural(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    std::string item = trim(std::string_view(text).substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<std::size_t> parse_natural_list(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_natural(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

}  // namespace cimclg
