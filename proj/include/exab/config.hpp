// INI-style run configuration: [section] headers, key = value lines,
// '#' or ';' comments. Sections and keys are validated against an allow-list
// so a typo fails loudly instead of being silently ignored.
#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace exab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  // Missing key: the defaulted overloads fall back, the others throw
  // ConfigError. Malformed values always throw.
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;

  // Comma-separated lists.
  std::vector<std::string> get_string_list(const std::string& section,
                                           const std::string& key) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;

  // Throws ConfigError naming the first section or key not in `allowed`.
  void check_known(
      const std::map<std::string, std::set<std::string>>& allowed) const;

 private:
  const std::string* find(const std::string& section,
                          const std::string& key) const;
  std::string origin_;
  // section -> key -> raw value
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace exab
