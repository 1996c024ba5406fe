#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace wiplab {

// Minimal TOML subset: [section] headers, key = value lines with strings,
// integers, floats, booleans, and flat number arrays; # comments.  Keys
// are flattened to "section.key".
class Config {
 public:
  using Value = std::variant<std::string, double, bool, std::vector<double>>;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_array(const std::string& key) const;

  std::set<std::string> keys() const;

  // throws std::invalid_argument naming the first key outside `allowed`
  void reject_unknown_keys(const std::set<std::string>& allowed) const;

 private:
  const Value& at(const std::string& key) const;
  std::map<std::string, Value> values_;
  // unquoted scalar tokens verbatim, so 64-bit seeds survive intact
  std::map<std::string, std::string> raw_;
};

}  // namespace wiplab
