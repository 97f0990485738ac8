#pragma once

// Run configuration: a flat key-value map read from "key = value" text (with
// '#' comments), overridden by command-line flags, plus typed accessors that
// validate as they read.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "principal/catalog/registry.hpp"
#include "principal/errors.hpp"
#include "principal/surface.hpp"

namespace principal::io {

/// Usage and configuration problems; the CLI maps these to exit code 2.
class ConfigError : public Error {
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;  // ordered, so the echo is stable

  bool has(const std::string& key) const { return values.count(key) > 0; }

  void set(const std::string& key, const std::string& value) { values[key] = value; }

  std::string str(const std::string& key, const std::string& def = {}) const {
    const auto it = values.find(key);
    return it == values.end() ? def : it->second;
  }

  double num(const std::string& key, double def) const {
    if (!has(key)) return def;
    try {
      return catalog::detail::parse_number(str(key));
    } catch (const ParamError&) {
      throw ConfigError(key + ": expected a number, got '" + str(key) + "'");
    }
  }

  double positive(const std::string& key, double def) const {
    const double v = num(key, def);
    if (!(v > 0)) throw ConfigError(key + " must be positive");
    return v;
  }

  int count(const std::string& key, int def, int lo = 0) const {
    const double v = num(key, def);
    if (v != static_cast<double>(static_cast<long long>(v)) || v < lo || v > 1e9)
      throw ConfigError(key + ": expected an integer >= " + std::to_string(lo));
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool def = false) const {
    if (!has(key)) return def;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
  }

  std::vector<double> list(const std::string& key) const {
    try {
      return catalog::detail::parse_list(str(key));
    } catch (const ParamError&) {
      throw ConfigError(key + ": expected a comma-separated list of numbers");
    }
  }

  Vec3 point(const std::string& key) const {
    const auto v = list(key);
    if (v.size() != 3) throw ConfigError(key + ": expected x,y,z");
    return Vec3(v[0], v[1], v[2]);
  }

  std::uint64_t seed() const {
    const double v = num("seed", 0);
    if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) throw ConfigError("seed must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
};

/// Parses "key = value" lines. Blank lines and '#' comments are ignored;
/// later keys override earlier ones.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = catalog::detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = catalog::detail::trim(t.substr(0, eq));
    const std::string value = catalog::detail::trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    out[key] = value;
  }
  return out;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace principal::io
