#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "booom/errors.hpp"

namespace booom {

// Flat key=value configuration. One `key = value` pair per line; everything
// from '#' to the end of the line is a comment; blank lines are skipped; keys
// may not repeat. Lookups record which keys were consumed so that
// reject_unknown() can fail on anything the reader never asked about —
// misspelled keys fail loudly instead of silently falling back to defaults.
// All errors are ConfigError.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text);

  bool contains(const std::string& key) const;

  // Typed getters; the no-fallback forms throw ConfigError when the key is
  // absent. Numeric and boolean parses must consume the whole value.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Comma-separated list of decimals (spaces allowed around entries).
  std::vector<double> get_double_list(const std::string& key) const;

  // Throws ConfigError naming every key that no getter has touched.
  void reject_unknown() const;

  std::vector<std::string> keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace booom
