#include "twotime/emit.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "twotime/version.hpp"

namespace twotime {

bool ResultBundle::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string table_to_csv(const ResultTable& t) {
  std::string out;
  for (size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw std::invalid_argument("table '" + t.name + "' row width mismatch");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_real(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string manifest_json(const ResultBundle& b, bool include_timestamp) {
  nlohmann::json j;
  j["scenario"] = b.scenario;
  j["oracle"] = b.oracle;
  j["exploratory"] = b.exploratory;
  j["config_hash"] = b.config_hash;
  j["master_seed"] = b.master_seed;
  j["replicas"] = b.replicas;
  j["code_version"] = kVersion;
  j["checkpoint_version"] = kCheckpointVersion;
  j["config"] = b.config_echo;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : b.tables) j["tables"].push_back(t.name + ".csv");
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : b.verdicts) {
    nlohmann::json jv;
    jv["check"] = v.check;
    jv["measured"] = format_real(v.measured);
    jv["exact"] = format_real(v.exact);
    jv["error"] = format_real(v.error);
    jv["sigma"] = format_real(v.sigma);
    jv["tolerance_sigma"] = format_real(v.tolerance_sigma);
    jv["pass"] = v.pass;
    j["verdicts"].push_back(jv);
  }
  j["all_pass"] = b.all_pass();
  j["notes"] = b.notes;
  if (include_timestamp) {
    char stamp[32];
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["timestamp"] = stamp;
  }
  return j.dump(2) + "\n";
}

void emit_results(const ResultBundle& b, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + out_dir +
                             "': " + ec.message());
  auto write_file = [&](const std::string& name, const std::string& content) {
    fs::path p = fs::path(out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
  };
  for (const auto& t : b.tables) write_file(t.name + ".csv", table_to_csv(t));
  write_file("manifest.json", manifest_json(b));
}

}  // namespace twotime
