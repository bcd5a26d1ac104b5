#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rydcopy/rydcopy.h"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> trajectories;
  std::optional<std::size_t> workers;
};

int fail(const char* what, rydcopy_status st) {
  std::fprintf(stderr, "rydcopy: %s: %s (%s)\n", what, rydcopy_last_error(), rydcopy_status_string(st));
  return static_cast<int>(st);
}

int run(const std::string& command, const Options& opt) {
  rydcopy_config* cfg = nullptr;
  rydcopy_status st =
      opt.config_path.empty() ? rydcopy_config_default(&cfg) : rydcopy_config_load(opt.config_path.c_str(), &cfg);
  if (st != RYDCOPY_OK) return fail("loading config", st);

  if (opt.seed) rydcopy_config_set_seed(cfg, *opt.seed);
  if (opt.out_dir) rydcopy_config_set_output_dir(cfg, opt.out_dir->c_str());
  if (opt.trajectories && (st = rydcopy_config_set_trajectories(cfg, *opt.trajectories)) != RYDCOPY_OK) {
    rydcopy_config_free(cfg);
    return fail("--trajectories", st);
  }
  if (opt.workers && (st = rydcopy_config_set_workers(cfg, *opt.workers)) != RYDCOPY_OK) {
    rydcopy_config_free(cfg);
    return fail("--workers", st);
  }

  rydcopy_result* res = nullptr;
  const rydcopy_status run_st = rydcopy_run(cfg, command.c_str(), &res);
  if (!res) {
    rydcopy_config_free(cfg);
    return fail(command.c_str(), run_st);
  }
  st = rydcopy_result_write(res, cfg);
  if (st != RYDCOPY_OK) {
    rydcopy_result_free(res);
    rydcopy_config_free(cfg);
    return fail("writing outputs", st);
  }
  if (command == "validate" || command == "gate-time-table") {
    for (std::size_t i = 0; i < rydcopy_result_table_count(res); ++i) std::fputs(rydcopy_result_table_csv(res, i), stdout);
  }
  for (std::size_t i = 0; i < rydcopy_result_file_count(res); ++i)
    std::fprintf(stderr, "wrote %s\n", rydcopy_result_file_path(res, i));
  rydcopy_result_free(res);
  rydcopy_config_free(cfg);
  if (run_st != RYDCOPY_OK) return fail(command.c_str(), run_st);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-atom Rydberg copy gate and collective readout simulator"};
  app.set_version_flag("--version", std::string(rydcopy_version()));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "root seed (overrides config)");
    sub->add_option("--out", opt.out_dir, "output directory (overrides config)");
    sub->add_option("--trajectories", opt.trajectories, "trajectories per logical state");
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  };

  std::string chosen;
  const char* commands[][2] = {
      {"gate-time-table", "gate durations in units of pi/Omega"},
      {"gate-sweep", "gate infidelity over the Omega grid"},
      {"readout-curve", "measurement infidelity versus integration time"},
      {"min-time", "shortest integration time reaching each target infidelity"},
      {"validate", "run the built-in oracle checks"},
  };
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    add_common(sub);
    sub->callback([&chosen, name = std::string(c[0])] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);
  return run(chosen, opt);
}
