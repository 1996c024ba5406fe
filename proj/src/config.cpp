#include "wiplab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wiplab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// strips a trailing comment that is not inside a quoted string
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& token, int line_no) {
  char* end = nullptr;
  const double x = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    throw std::invalid_argument("config line " + std::to_string(line_no) +
                                ": cannot parse value '" + token + "'");
  return x;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key =
        (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    if (trim(line.substr(0, eq)).empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    if (cfg.values_.count(key))
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    const std::string raw = trim(line.substr(eq + 1));
    if (raw.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty value for '" + key + "'");
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"')
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated string");
      cfg.values_[key] = raw.substr(1, raw.size() - 2);
    } else if (raw == "true" || raw == "false") {
      cfg.values_[key] = (raw == "true");
    } else if (raw.front() == '[') {
      if (raw.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated array");
      std::vector<double> arr;
      std::string body = raw.substr(1, raw.size() - 2);
      std::istringstream items(body);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty())
          throw std::invalid_argument("config line " +
                                      std::to_string(line_no) +
                                      ": empty array element");
        arr.push_back(parse_number(item, line_no));
      }
      cfg.values_[key] = arr;
    } else {
      cfg.values_[key] = parse_number(raw, line_no);
      cfg.raw_[key] = raw;
    }
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool Config::has(const std::string& key) const { return values_.count(key); }

const Config::Value& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    throw std::invalid_argument("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key) const {
  const Value& v = at(key);
  if (!std::holds_alternative<std::string>(v))
    throw std::invalid_argument("config: '" + key + "' is not a string");
  return std::get<std::string>(v);
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const Value& v = at(key);
  if (!std::holds_alternative<double>(v))
    throw std::invalid_argument("config: '" + key + "' is not a number");
  return std::get<double>(v);
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const double x = get_double(key);
  if (x != std::floor(x) || std::abs(x) > 9e15)
    throw std::invalid_argument("config: '" + key + "' is not an integer");
  return static_cast<long>(x);
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_seed(const std::string& key,
                               std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const auto it = raw_.find(key);
  if (it == raw_.end())
    throw std::invalid_argument("config: '" + key + "' is not an integer");
  try {
    std::size_t pos = 0;
    const std::uint64_t s = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return s;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key +
                                "' is not an unsigned 64-bit integer");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = at(key);
  if (!std::holds_alternative<bool>(v))
    throw std::invalid_argument("config: '" + key + "' is not a boolean");
  return std::get<bool>(v);
}

std::vector<double> Config::get_array(const std::string& key) const {
  const Value& v = at(key);
  if (!std::holds_alternative<std::vector<double>>(v))
    throw std::invalid_argument("config: '" + key + "' is not an array");
  return std::get<std::vector<double>>(v);
}

std::set<std::string> Config::keys() const {
  std::set<std::string> out;
  for (const auto& [k, _] : values_) out.insert(k);
  return out;
}

void Config::reject_unknown_keys(const std::set<std::string>& allowed) const {
  for (const auto& [k, _] : values_)
    if (!allowed.count(k))
      throw std::invalid_argument("config: unknown key '" + k + "'");
}

}  // namespace wiplab
