#include "twotime/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twotime {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "' is not a number: '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "' is not an integer: '" + v + "'");
  }
}

bool parse_flag(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::invalid_argument("key '" + key + "' is not a flag: '" + v + "'");
}

void check_typed(const ParamSpec& p, const std::string& v) {
  switch (p.type) {
    case 'r':
      parse_real(p.key, v);
      break;
    case 'i':
      parse_int(p.key, v);
      break;
    case 'b':
      parse_flag(p.key, v);
      break;
    case 'R':
      for (const auto& item : split_list(v)) parse_real(p.key, item);
      break;
    case 'I':
      for (const auto& item : split_list(v)) parse_int(p.key, item);
      break;
    default:
      break;
  }
}

}  // namespace

bool RunConfig::has(const std::string& key) const {
  return values.count(key) != 0;
}

std::string RunConfig::get_str(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end())
    throw std::invalid_argument("missing key '" + key + "'");
  return it->second;
}

double RunConfig::get_real(const std::string& key) const {
  return parse_real(key, get_str(key));
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  return parse_int(key, get_str(key));
}

bool RunConfig::get_flag(const std::string& key) const {
  return parse_flag(key, get_str(key));
}

std::vector<double> RunConfig::get_real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get_str(key)))
    out.push_back(parse_real(key, item));
  return out;
}

std::vector<std::int64_t> RunConfig::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(get_str(key)))
    out.push_back(parse_int(key, item));
  return out;
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : values) {
    if (k == "output_dir" || k == "workers") continue;
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string RunConfig::config_hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text())));
  return buf;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> raw;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": empty key");
    if (raw.count(key))
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    raw[key] = val;
  }

  auto sc = raw.find("scenario");
  if (sc == raw.end())
    throw std::invalid_argument(origin + ": missing key 'scenario'");
  const std::string scenario = sc->second;
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument(origin + ": unknown scenario '" + scenario +
                                "' (known: " + known + ")");
  }

  const auto& params = scenario_params(scenario);
  for (const auto& [k, v] : raw) {
    if (k == "scenario") continue;
    bool known = false;
    for (const auto& p : params)
      if (p.key == k) {
        check_typed(p, v);
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument(origin + ": unknown key '" + k +
                                  "' for scenario '" + scenario + "'");
  }

  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.values = raw;
  for (const auto& p : params)
    if (!cfg.values.count(p.key)) cfg.values[p.key] = p.default_value;

  if (cfg.has("langevin_step") && cfg.get_real("langevin_step") <= 0.0)
    throw std::invalid_argument("langevin_step must be positive");
  if (cfg.has("master_seed"))
    cfg.master_seed = static_cast<std::uint64_t>(cfg.get_int("master_seed"));
  if (cfg.has("replicas")) {
    std::int64_t r = cfg.get_int("replicas");
    if (r < 1) throw std::invalid_argument("replicas must be at least 1");
    cfg.replicas = static_cast<int>(r);
  }
  if (cfg.has("output_dir")) cfg.output_dir = cfg.get_str("output_dir");
  if (cfg.has("workers")) {
    std::int64_t w = cfg.get_int("workers");
    if (w < 0) throw std::invalid_argument("workers must be non-negative");
    cfg.workers = static_cast<int>(w);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace twotime
