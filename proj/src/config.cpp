#include "exab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace exab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& raw, const std::string& where) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(raw, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != raw.size() || !std::isfinite(value))
    throw ConfigError(where + ": bad numeric value '" + raw + "'");
  return value;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = origin + ":" + std::to_string(lineno);
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      cfg.values_[section];  // a section may legitimately stay empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value' or '[section]'");
    if (section.empty())
      throw ConfigError(where + ": key before any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!cfg.values_[section].emplace(key, value).second)
      throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const std::string* Config::find(const std::string& section,
                                const std::string& key) const {
  const auto sec = values_.find(section);
  if (sec == values_.end()) return nullptr;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? nullptr : &it->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v)
    throw ConfigError(origin_ + ": missing [" + section + "] " + key);
  return *v;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& section,
                          const std::string& key) const {
  return parse_double(get_string(section, key),
                      origin_ + ": [" + section + "] " + key);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  return parse_double(*v, origin_ + ": [" + section + "] " + key);
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const double d = get_double(section, key);
  const int i = static_cast<int>(std::lround(d));
  if (d != static_cast<double>(i))
    throw ConfigError(origin_ + ": [" + section + "] " + key +
                      " must be an integer");
  return i;
}

int Config::get_int(const std::string& section, const std::string& key,
                    int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<std::string> Config::get_string_list(const std::string& section,
                                                 const std::string& key) const {
  const std::string raw = get_string(section, key);
  std::vector<std::string> out;
  std::istringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError(origin_ + ": [" + section + "] " + key +
                        " has an empty list element");
    out.push_back(item);
  }
  if (out.empty())
    throw ConfigError(origin_ + ": [" + section + "] " + key + " is empty");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_string_list(section, key))
    out.push_back(parse_double(item, origin_ + ": [" + section + "] " + key));
  return out;
}

void Config::check_known(
    const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& [section, keys] : values_) {
    const auto sec = allowed.find(section);
    if (sec == allowed.end())
      throw ConfigError(origin_ + ": unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      if (!sec->second.count(key))
        throw ConfigError(origin_ + ": unknown key '" + key + "' in [" +
                          section + "]");
    }
  }
}

}  // namespace exab
