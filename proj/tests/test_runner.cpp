#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "twotime/config.hpp"
#include "twotime/emit.hpp"
#include "twotime/scenarios.hpp"

using namespace twotime;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string no_timestamp(std::string manifest) {
  return std::regex_replace(manifest,
                            std::regex("\\s*\"timestamp\"[^\n]*\n"), "\n");
}

fs::path scratch(const std::string& leaf) {
  fs::path root = fs::temp_directory_path() / "twotime_runner_tests" / leaf;
  fs::remove_all(root);
  fs::create_directories(root);
  return root;
}

// small but statistically healthy: the fluctuation-time estimate needs
// roughly 1e4 steps at this step size
std::string tiny_ou(const std::string& out_dir, int workers) {
  std::ostringstream ss;
  ss << "scenario = ou_check\n"
     << "steps = 12000\n"
     << "burn_in_steps = 1000\n"
     << "noise_probe_draws = 20000\n"
     << "replicas = 2\n"
     << "workers = " << workers << "\n"
     << "output_dir = " << out_dir << "\n";
  return ss.str();
}

// the library computes, the caller emits; tests that compare bytes do both
ResultBundle run_and_emit(const std::string& cfg_text) {
  RunConfig cfg = parse_config_text(cfg_text);
  ResultBundle b = run_scenario(cfg);
  emit_results(b, cfg.output_dir);
  return b;
}

}  // namespace

TEST_CASE("parsing fills declared defaults") {
  RunConfig cfg = parse_config_text("scenario = ou_check\n");
  CHECK(cfg.scenario == "ou_check");
  CHECK(cfg.master_seed == 1);
  CHECK(cfg.replicas == 16);
  CHECK(cfg.workers == 0);
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.get_real("langevin_step") == doctest::Approx(0.01));
  CHECK(cfg.get_int("steps") == 200000);
  CHECK(cfg.has("mass"));
  CHECK_FALSE(cfg.has("no_such_key"));
}

TEST_CASE("comments and blank lines are ignored") {
  RunConfig cfg = parse_config_text(
      "# leading comment\n"
      "scenario = ou_check   # trailing comment\n"
      "\n"
      "  mass = 2.5\n");
  CHECK(cfg.get_real("mass") == doctest::Approx(2.5));
}

TEST_CASE("strict parsing rejects malformed input") {
  CHECK_THROWS_WITH_AS(parse_config_text("mass = 1\n"),
                       "<string>: missing key 'scenario'", std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("scenario = not_a_scenario\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("scenario = ou_check\nbogus_key = 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config_text("scenario = ou_check\nmass = 1\nmass = 2\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("scenario = ou_check\njust some words\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("scenario = ou_check\nsteps = banana\n"),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text("scenario = ou_check\nlangevin_step = 0\n"),
      "langevin_step must be positive", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = ou_check\nreplicas = 0\n"),
                       "replicas must be at least 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = ou_check\nworkers = -1\n"),
                       "workers must be non-negative", std::invalid_argument);
}

TEST_CASE("list-typed parameters parse") {
  RunConfig cfg = parse_config_text("scenario = double_well_ssb\n");
  auto vols = cfg.get_int_list("volumes");
  REQUIRE(vols.size() == 3);
  CHECK(vols[0] == 8);
  CHECK(vols[2] == 32);
  auto spans = cfg.get_real_list("spans");
  REQUIRE(spans.size() == 3);
  CHECK(spans[0] == doctest::Approx(20000.0));
}

TEST_CASE("hash ignores placement, tracks physics") {
  RunConfig a = parse_config_text(
      "scenario = ou_check\noutput_dir = /tmp/a\nworkers = 1\n");
  RunConfig b = parse_config_text(
      "scenario = ou_check\noutput_dir = /somewhere/else\nworkers = 8\n");
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(a.config_hash() == b.config_hash());

  RunConfig c = parse_config_text("scenario = ou_check\nsteps = 100001\n");
  CHECK(c.config_hash() != a.config_hash());
  CHECK(a.canonical_text().find("output_dir") == std::string::npos);
  CHECK(a.canonical_text().find("workers") == std::string::npos);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("real formatting is value-stable") {
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_real(-0.0) == "-0");
}

TEST_CASE("tables render to exact csv bytes") {
  ResultTable t;
  t.name = "demo";
  t.columns = {"a", "b"};
  t.rows = {{1.0, 0.25}, {-3.0, 1.0 / 3.0}};
  CHECK(table_to_csv(t) == "a,b\n1,0.25\n-3,0.33333333333333331\n");
}

TEST_CASE("manifest bytes are deterministic without the timestamp") {
  ResultBundle b;
  b.scenario = "demo";
  b.oracle = "closed form";
  b.config_hash = "abc";
  b.replicas = 2;
  OracleVerdict v;
  v.check = "x";
  v.pass = true;
  b.verdicts.push_back(v);
  CHECK(manifest_json(b, false) == manifest_json(b, false));
  CHECK(manifest_json(b, true).find("timestamp") != std::string::npos);
  CHECK(manifest_json(b, false).find("timestamp") == std::string::npos);
  CHECK(b.all_pass());
  b.verdicts.push_back(OracleVerdict{});
  CHECK_FALSE(b.all_pass());
}

TEST_CASE("scenario catalog is complete and oracle-backed") {
  const auto& names = scenario_names();
  for (const char* want :
       {"ou_check", "free_field", "ho_ground_state", "delta_sweep",
        "double_well_ssb", "two_path_interference", "nelson_oracle"}) {
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
    const ScenarioInfo& info = scenario_info(want);
    CHECK_FALSE(info.summary.empty());
    CHECK_FALSE(info.oracle.empty());
    CHECK_FALSE(info.exploratory);
    CHECK_FALSE(scenario_params(want).empty());
  }
  CHECK_THROWS_AS(scenario_params("nope"), std::invalid_argument);
  CHECK_THROWS_AS(scenario_info("nope"), std::invalid_argument);
}

TEST_CASE("identical config and seed give identical bytes") {
  fs::path d1 = scratch("det1");
  fs::path d2 = scratch("det2");
  ResultBundle r1 = run_and_emit(tiny_ou(d1.string(), 1));
  ResultBundle r2 = run_and_emit(tiny_ou(d2.string(), 1));
  CHECK(r1.config_hash == r2.config_hash);
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK(slurp(d1 / "replica_stats.csv") == slurp(d2 / "replica_stats.csv"));
  CHECK(slurp(d1 / "config.echo.cfg") == slurp(d2 / "config.echo.cfg"));
  CHECK(no_timestamp(slurp(d1 / "manifest.json")) ==
        no_timestamp(slurp(d2 / "manifest.json")));
}

TEST_CASE("worker count never reaches the output bytes") {
  fs::path d1 = scratch("w1");
  fs::path d2 = scratch("w3");
  run_and_emit(tiny_ou(d1.string(), 1));
  run_and_emit(tiny_ou(d2.string(), 3));
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK(slurp(d1 / "replica_stats.csv") == slurp(d2 / "replica_stats.csv"));
}

TEST_CASE("resume completes an interrupted run byte-identically") {
  fs::path ref = scratch("resume_ref");
  run_and_emit(tiny_ou(ref.string(), 1));

  // stage a torn run: keep the config echo and one finished replica record,
  // drop the aggregates and the other record
  fs::path torn = scratch("resume_torn");
  fs::copy(ref, torn, fs::copy_options::recursive |
                          fs::copy_options::overwrite_existing);
  fs::remove(torn / "manifest.json");
  fs::remove(torn / "summary.csv");
  fs::remove(torn / "replica_stats.csv");
  REQUIRE(fs::exists(torn / "replicas" / "main" / "r0001.json"));
  fs::remove(torn / "replicas" / "main" / "r0001.json");

  ResultBundle r = resume_scenario(torn.string());
  emit_results(r, torn.string());
  CHECK(r.scenario == "ou_check");
  CHECK(slurp(ref / "summary.csv") == slurp(torn / "summary.csv"));
  CHECK(slurp(ref / "replica_stats.csv") == slurp(torn / "replica_stats.csv"));
  CHECK(no_timestamp(slurp(ref / "manifest.json")) ==
        no_timestamp(slurp(torn / "manifest.json")));
}

TEST_CASE("resume refuses a directory without a config echo") {
  fs::path empty = scratch("resume_empty");
  CHECK_THROWS_AS(resume_scenario(empty.string()), std::runtime_error);
}

TEST_CASE("stale records from a different config are not reused") {
  fs::path d = scratch("stale");
  run_and_emit(tiny_ou(d.string(), 1));
  std::string first = slurp(d / "summary.csv");

  // same directory, one physics knob changed: every replica must recompute
  ResultBundle r = run_and_emit(tiny_ou(d.string(), 1) + "mass = 1.5\n");
  std::string second = slurp(d / "summary.csv");
  CHECK(first != second);
  for (const auto& note : r.notes) CHECK(note.find("runaway") == std::string::npos);
}

TEST_CASE("window sweep table carries the declared columns") {
  fs::path d = scratch("sweep");
  std::ostringstream ss;
  ss << "scenario = delta_sweep\n"
     << "windows = 0.5,1,2,4\n"
     << "lead = 1\n"
     << "burn_in_steps = 200\n"
     << "replicas = 6\n"
     << "ensemble_replicas = 2\n"
     << "ensemble_steps = 20000\n"
     << "ensemble_burn_in = 500\n"
     << "workers = 1\n"
     << "output_dir = " << d.string() << "\n";
  run_and_emit(ss.str());
  std::string csv = slurp(d / "delta_sweep.csv");
  CHECK(csv.rfind("delta_over_deltafluct,windowed,ensemble_ref,diff,err\n", 0) ==
        0);
  // one row per window plus the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(fs::exists(d / "window_variance.csv"));
}
