#include "xlsent/config.hpp"

#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "xlsent/common.hpp"

namespace xlsent::harness {

Config Config::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  Config cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      cfg.sections_[""][name] = std::string(trim(node.data()));
      continue;
    }
    auto& section = cfg.sections_[name];
    for (const auto& [key, value] : node) section[key] = std::string(trim(value.data()));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string Config::get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return parse_int(*v);
  } catch (const DataError&) {
    throw DataError("config: [" + section + "] " + key + " must be an integer, got '" + *v + "'");
  }
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return parse_double(*v);
  } catch (const DataError&) {
    throw DataError("config: [" + section + "] " + key + " must be a number, got '" + *v + "'");
  }
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  throw DataError("config: [" + section + "] " + key + " must be a boolean, got '" + *v + "'");
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

std::map<std::string, std::string> Config::with_prefix(const std::string& section, const std::string& prefix) const {
  std::map<std::string, std::string> out;
  auto s = sections_.find(section);
  if (s == sections_.end()) return out;
  for (const auto& [k, v] : s->second) {
    if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0) out[k.substr(prefix.size())] = v;
  }
  return out;
}

}  // namespace xlsent::harness
