#pragma once

// Flat sectioned key = value configuration:
//
//   # comment
//   [model]
//   n_emitters = 10
//   g_collective = 0.4   # trailing comment
//
// Keys are unique within a section; values are kept as text and converted on
// access. Errors carry ConfigParse, ConfigMissingKey or ConfigUnknownKey.

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace superrad::config {

using Section = std::map<std::string, std::string>;

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<input>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Throws ConfigMissingKey naming "section.key", ConfigParse on a bad value.
  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  /// Comma- or whitespace-separated numbers.
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  /// Throws ConfigUnknownKey for any section or key outside the schema.
  void require_known(const std::map<std::string, std::set<std::string>>& schema) const;

  const std::map<std::string, Section>& sections() const { return sections_; }
  const std::string& source() const { return source_; }

 private:
  std::optional<std::string> find(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, Section> sections_;
};

/// Strict conversions shared with command-line values; throw ConfigParse.
double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);
std::vector<double> parse_list(const std::string& text, const std::string& what);

}  // namespace superrad::config
