#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "twotime/config.hpp"
#include "twotime/emit.hpp"
#include "twotime/scenarios.hpp"
#include "twotime/version.hpp"

namespace {

void apply_overrides(twotime::RunConfig& cfg, std::int64_t seed, int replicas,
                     const std::string& output, int workers) {
  if (seed >= 0) {
    cfg.master_seed = static_cast<std::uint64_t>(seed);
    cfg.values["master_seed"] = std::to_string(seed);
  }
  if (replicas > 0) {
    cfg.replicas = replicas;
    cfg.values["replicas"] = std::to_string(replicas);
  }
  if (!output.empty()) {
    cfg.output_dir = output;
    cfg.values["output_dir"] = output;
  }
  if (workers >= 0) {
    cfg.workers = workers;
    cfg.values["workers"] = std::to_string(workers);
  }
}

// prints one line per oracle comparison; returns the process exit code
int report(const twotime::ResultBundle& b, const std::string& out_dir) {
  for (const twotime::OracleVerdict& v : b.verdicts)
    std::printf("[%s] %-28s measured=%s exact=%s sigma=%s (tol %s)\n",
                v.pass ? "PASS" : "FAIL", v.check.c_str(),
                twotime::format_real(v.measured).c_str(),
                twotime::format_real(v.exact).c_str(),
                twotime::format_real(v.sigma).c_str(),
                twotime::format_real(v.tolerance_sigma).c_str());
  for (const std::string& n : b.notes) std::printf("note: %s\n", n.c_str());
  std::printf("results under %s (config %s)\n", out_dir.c_str(),
              b.config_hash.c_str());
  return b.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-time stochastic quantization runner"};
  app.set_version_flag("--version", std::string(twotime::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string resume_dir;
  std::string output;
  std::int64_t seed = -1;
  int replicas = 0;
  int workers = -1;

  CLI::App* run = app.add_subcommand("run", "run a scenario from a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "override master_seed");
  run->add_option("--replicas", replicas, "override replica count");
  run->add_option("--output", output, "override output directory");
  run->add_option("--workers", workers, "override worker count (0 = hardware)");

  CLI::App* list =
      app.add_subcommand("list-scenarios", "print the scenario catalog");
  bool with_params = false;
  list->add_flag("--params", with_params, "include the parameter surface");

  CLI::App* validate =
      app.add_subcommand("validate", "parse and check a config file");
  validate->add_option("config", config_path, "config file")->required();

  CLI::App* resume =
      app.add_subcommand("resume", "finish an interrupted run in place");
  resume->add_option("dir", resume_dir, "output directory of the interrupted run")
      ->required();
  resume->add_option("--workers", workers, "override worker count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      twotime::RunConfig cfg = twotime::load_config(config_path);
      apply_overrides(cfg, seed, replicas, output, workers);
      const twotime::ResultBundle b = twotime::run_scenario(cfg);
      twotime::emit_results(b, cfg.output_dir);
      return report(b, cfg.output_dir);
    }
    if (list->parsed()) {
      for (const twotime::ScenarioInfo& s : twotime::scenario_catalog()) {
        std::printf("%s\n  %s\n  oracle: %s\n  tolerance: %s\n", s.name.c_str(),
                    s.summary.c_str(), s.oracle.c_str(), s.tolerance.c_str());
        if (with_params)
          for (const twotime::ParamSpec& p : twotime::scenario_params(s.name))
            std::printf("    %-18s %c  default %-12s %s\n", p.key.c_str(),
                        p.type, p.default_value.c_str(), p.help.c_str());
        std::printf("\n");
      }
      return 0;
    }
    if (validate->parsed()) {
      const twotime::RunConfig cfg = twotime::load_config(config_path);
      std::printf("ok: scenario %s, %d replica(s), seed %llu, config %s\n",
                  cfg.scenario.c_str(), cfg.replicas,
                  static_cast<unsigned long long>(cfg.master_seed),
                  cfg.config_hash().c_str());
      return 0;
    }
    if (resume->parsed()) {
      twotime::ResultBundle b;
      if (workers >= 0) {
        twotime::RunConfig cfg =
            twotime::load_config(resume_dir + "/config.echo.cfg");
        cfg.output_dir = resume_dir;
        cfg.workers = workers;
        b = twotime::run_scenario(cfg);
      } else {
        b = twotime::resume_scenario(resume_dir);
      }
      twotime::emit_results(b, resume_dir);
      return report(b, resume_dir);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
