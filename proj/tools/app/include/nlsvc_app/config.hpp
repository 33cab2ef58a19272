#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlsvc::app {

/// Schema violation in a scenario configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat dotted-key configuration. Typed getters record which keys were
/// read so leftover (unknown) keys can be reported.
class Config {
 public:
  Config() = default;
  explicit Config(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  /// `key = value` lines with `#` comments.
  static Config parse_flat(const std::string& text);
  /// Nested JSON objects flattened to dotted keys; arrays become comma lists.
  static Config parse_json(const std::string& text);
  /// Chooses the format from the extension (.json) or a leading '{'.
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Keys never read by a getter.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string* lookup(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace nlsvc::app
