#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace twotime {

// Named table of real-valued columns.  Values render with %.17g, so identical
// doubles always produce identical bytes.
struct ResultTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// One automatic comparison of an aggregate against its declared reference.
struct OracleVerdict {
  std::string check;
  double measured = 0.0;
  double exact = 0.0;
  double error = 0.0;   // standard error of the measured value
  double sigma = 0.0;   // |measured - exact| / error
  double tolerance_sigma = 3.0;
  bool pass = false;
};

struct ResultBundle {
  std::string scenario;
  std::string oracle;  // declared reference, or "none (exploratory)"
  std::string config_hash;
  std::uint64_t master_seed = 0;
  int replicas = 0;
  bool exploratory = false;
  std::map<std::string, std::string> config_echo;
  std::vector<ResultTable> tables;
  std::vector<OracleVerdict> verdicts;
  std::vector<std::string> notes;  // runaway reports and similar per-replica events

  bool all_pass() const;
};

std::string format_real(double v);
std::string table_to_csv(const ResultTable& t);
std::string manifest_json(const ResultBundle& b, bool include_timestamp = true);

// Writes <table>.csv per table plus manifest.json under out_dir (created if
// missing).  Every byte except the manifest timestamp is a pure function of
// the bundle.
void emit_results(const ResultBundle& b, const std::string& out_dir);

}  // namespace twotime
