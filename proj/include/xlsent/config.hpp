#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace xlsent::harness {

/// INI-style `[section]` / `key = value` configuration. Keys may contain dots
/// (`train.en = ...`); they are taken literally.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Keys of a section that start with `prefix`, with the prefix removed.
  std::map<std::string, std::string> with_prefix(const std::string& section, const std::string& prefix) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace xlsent::harness
