#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace qent {

/// Flat `key = value` file with dotted namespaces (`model.kind = thermal`).
/// Lines starting with '#' are comments. Later assignments win, which is how
/// command-line overrides are layered on top of a file.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<input>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Parses `key=value`; throws ConfigError when there is no '='.
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Keys never read through the accessors above.
  std::set<std::string> unused_keys() const;

 private:
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace qent
