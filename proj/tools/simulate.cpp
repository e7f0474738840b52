#include <cstdint>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "otfs/config.hpp"
#include "otfs/curves.hpp"
#include "otfs/montecarlo.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo link-level run of one OTFS-NOMA scenario"};
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed, trials;
  unsigned threads = 1;
  app.add_option("--config", config_path, "scenario file (key = value lines)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "CSV output path")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--trials", trials, "override the config trial count");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  try {
    otfs::ScenarioConfig config = otfs::load_config(config_path);
    if (seed) config.seed = *seed;
    if (trials) config.trials = *trials;
    config.validate();
    const auto points = otfs::run_scenario(config, threads);
    otfs::emit_csv(points, out_path);
    std::cerr << "wrote " << points.size() << " points to " << out_path << '\n';
  } catch (const otfs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
