#include "booom/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace booom {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_string(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ConfigMap ConfigMap::parse_string(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!map.values_.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return map;
}

bool ConfigMap::contains(const std::string& key) const {
  used_.insert(key);
  return values_.count(key) > 0;
}

std::string ConfigMap::get_string(const std::string& key) const {
  used_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  return contains(key) ? get_string(key) : fallback;
}

double ConfigMap::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a number");
  }
  return value;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

long ConfigMap::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as an integer");
  }
  return value;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigMap::get_seed(const std::string& key, std::uint64_t fallback) const {
  if (!contains(key)) return fallback;
  const std::string raw = get_string(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE || raw.find('-') != std::string::npos) {
    throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a seed");
  }
  return static_cast<std::uint64_t>(value);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  if (!contains(key)) return fallback;
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw ConfigError("key '" + key + "': cannot parse '" + raw +
                    "' as a boolean (use true/false/1/0)");
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<double> values;
  std::istringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string stripped = trim(item);
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(stripped.c_str(), &end);
    if (stripped.empty() || end == stripped.c_str() || *end != '\0' || errno == ERANGE) {
      throw ConfigError("key '" + key + "': cannot parse list entry '" + item + "'");
    }
    values.push_back(value);
  }
  if (values.empty()) throw ConfigError("key '" + key + "': empty list");
  return values;
}

void ConfigMap::reject_unknown() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (used_.count(key) == 0) {
      if (!unknown.empty()) unknown += ", ";
      unknown += "'" + key + "'";
    }
  }
  if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
}

std::vector<std::string> ConfigMap::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [key, value] : values_) out.push_back(key);
  return out;
}

}  // namespace booom
