#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "mtc/ingest.hpp"

namespace mtc {

// key = value configuration, one pair per line, '#' starts a comment.
// Consumers declare their allowed key set; anything else is fatal.
class Config {
 public:
  static Config parse(std::istream& in) {
    Config cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw InputError("config line " + std::to_string(line_no) + ": empty key");
      }
      if (cfg.values_.count(key)) {
        throw InputError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      }
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    return parse(in);
  }

  void require_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, _] : values_) {
      if (!allowed.count(key)) {
        std::string known;
        for (const auto& k : allowed) {
          if (!known.empty()) known += ", ";
          known += k;
        }
        throw InputError("unknown config key '" + key + "'; known keys: " + known);
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw InputError("missing required config key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  std::uint64_t get_u64(const std::string& key) const { return to_u64(key, get_string(key)); }
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
  }

  static double to_double(const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw InputError("config key '" + key + "': cannot parse number '" + value + "'");
    }
  }

  static std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(value, &used);
      if (used != value.size() || value.find('-') != std::string::npos) {
        throw std::invalid_argument("not a non-negative integer");
      }
      return v;
    } catch (const std::exception&) {
      throw InputError("config key '" + key + "': cannot parse integer '" + value + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace mtc
