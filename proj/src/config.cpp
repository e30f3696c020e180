#include "superrad/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "superrad/error.hpp"

namespace superrad::config {

namespace {

std::string trim(const std::string& s) {
  const auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  const auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); });
  return first < last.base() ? std::string(first, last.base()) : std::string();
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

std::string qualified(const std::string& section, const std::string& key) { return section + "." + key; }

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw Error(ErrorCode::ConfigParse, what + ": '" + text + "' is not a number");
  }
  return value;
}

long long parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw Error(ErrorCode::ConfigParse, what + ": '" + text + "' is not an integer");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw Error(ErrorCode::ConfigParse, what + ": '" + text + "' is not a boolean");
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < t.size()) {
    const std::size_t start = t.find_first_not_of(" \t", pos);
    if (start == std::string::npos) break;
    const std::size_t stop = std::min(t.find_first_of(" \t", start), t.size());
    out.push_back(parse_double(t.substr(start, stop - start), what));
    pos = stop;
  }
  return out;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string line;
  std::string section;
  int number = 0;
  const auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ConfigParse, source + ":" + std::to_string(number) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++number;
    const std::size_t hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail("unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_name(section)) fail("invalid section name '" + section + "'");
      cfg.sections_[section];
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (section.empty()) fail("key '" + key + "' outside any section");
    if (!valid_name(key)) fail("invalid key '" + key + "'");
    if (value.empty()) fail("empty value for '" + qualified(section, key) + "'");
    if (!cfg.sections_[section].emplace(key, value).second) {
      fail("duplicate key '" + qualified(section, key) + "'");
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot open config file '" + path.string() + "'");
  return parse(in, path.string());
}

std::optional<std::string> Config::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key).has_value();
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  const auto v = find(section, key);
  if (!v) {
    throw Error(ErrorCode::ConfigMissingKey, "missing key '" + qualified(section, key) + "' in " + source_);
  }
  return *v;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  return parse_double(get_string(section, key), qualified(section, key));
}

long long Config::get_int(const std::string& section, const std::string& key) const {
  return parse_int(get_string(section, key), qualified(section, key));
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  return parse_bool(get_string(section, key), qualified(section, key));
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
  return parse_list(get_string(section, key), qualified(section, key));
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return find(section, key).value_or(fallback);
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}

void Config::require_known(const std::map<std::string, std::set<std::string>>& schema) const {
  for (const auto& [name, entries] : sections_) {
    const auto allowed = schema.find(name);
    if (allowed == schema.end()) {
      throw Error(ErrorCode::ConfigUnknownKey, "unknown section '[" + name + "]' in " + source_);
    }
    for (const auto& [key, value] : entries) {
      if (!allowed->second.contains(key)) {
        throw Error(ErrorCode::ConfigUnknownKey, "unknown key '" + qualified(name, key) + "' in " + source_);
      }
    }
  }
}

}  // namespace superrad::config
