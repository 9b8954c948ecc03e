#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace toysae {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// minimal INI: [section], key = value, '#' or ';' comments, whitespace-trimmed
class Config {
 public:
  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  static Config parse(const std::string& text, const std::string& origin = "") {
    Config cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = strip(line);
      if (s.empty() || s[0] == '#' || s[0] == ';') continue;
      if (s.front() == '[') {
        if (s.back() != ']')
          throw ConfigError(origin + ":" + std::to_string(lineno) +
                            ": malformed section header");
        section = strip(s.substr(1, s.size() - 2));
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected key = value");
      std::string key = strip(s.substr(0, eq));
      std::string value = strip(s.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      cfg.values_[section + "." + key] = value;
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
  }

  std::string get_str(const std::string& section, const std::string& key) const {
    auto it = values_.find(section + "." + key);
    if (it == values_.end())
      throw ConfigError("missing config key [" + section + "] " + key);
    return it->second;
  }

  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const {
    auto it = values_.find(section + "." + key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& section, const std::string& key) const {
    return to_double(section, key, get_str(section, key));
  }
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    if (!has(section, key)) return fallback;
    return get_double(section, key);
  }

  std::uint64_t get_u64(const std::string& section, const std::string& key) const {
    return to_u64(section, key, get_str(section, key));
  }
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    return get_u64(section, key);
  }

  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const {
    std::vector<double> out;
    for (const std::string& tok : split_list(get_str(section, key)))
      out.push_back(to_double(section, key, tok));
    if (out.empty())
      throw ConfigError("empty list for [" + section + "] " + key);
    return out;
  }

  std::vector<std::uint64_t> get_u64_list(const std::string& section,
                                          const std::string& key) const {
    std::vector<std::uint64_t> out;
    for (const std::string& tok : split_list(get_str(section, key)))
      out.push_back(to_u64(section, key, tok));
    if (out.empty())
      throw ConfigError("empty list for [" + section + "] " + key);
    return out;
  }

  void set(const std::string& section, const std::string& key,
           const std::string& value) {
    values_[section + "." + key] = value;
  }

 private:
  static std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || c == ' ' || c == '\t') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  static double to_double(const std::string& section, const std::string& key,
                          const std::string& v) {
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("bad numeric value '" + v + "' for [" + section + "] " +
                        key);
    }
  }

  static std::uint64_t to_u64(const std::string& section, const std::string& key,
                              const std::string& v) {
    try {
      std::size_t pos = 0;
      unsigned long long u = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return u;
    } catch (const std::exception&) {
      throw ConfigError("bad integer value '" + v + "' for [" + section + "] " +
                        key);
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace toysae
