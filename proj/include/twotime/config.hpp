#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace twotime {

// One declared scenario parameter.  type: 'r' real, 'i' integer, 'b' flag,
// 's' string, 'R' comma-separated reals, 'I' comma-separated integers.
struct ParamSpec {
  std::string key;
  char type = 's';
  std::string default_value;
  std::string help;
};

// Catalog surface implemented by the scenario module.
const std::vector<std::string>& scenario_names();
const std::vector<ParamSpec>& scenario_params(const std::string& scenario);

// Flat key=value configuration ('#' starts a comment, keys are lowercase
// dotted identifiers).  Parsing is strict: keys outside the scenario's
// declared surface are rejected, missing keys take declared defaults.
struct RunConfig {
  std::string scenario;
  std::map<std::string, std::string> values;  // post-defaulting, includes scenario
  std::uint64_t master_seed = 1;
  int replicas = 1;
  std::string output_dir = "out";
  int workers = 0;  // 0 = one per hardware thread

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_flag(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  // sorted key=value lines; excludes output_dir and workers, which must not
  // influence any emitted byte
  std::string canonical_text() const;
  std::string config_hash() const;  // 64-bit FNV-1a of canonical_text, hex
};

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace twotime
