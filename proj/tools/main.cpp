#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "lzlmg/campaign.hpp"
#include "lzlmg/errors.hpp"

int main(int argc, char** argv) {
  using namespace lzlmg;

  CLI::App app{"Landau-Zener sweeps through the LMG model"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "JSON campaign config")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (overrides the config)");

  const char* engines[] = {"spectrum", "meanfield", "twa", "quantum", "lz", "fit"};
  for (const char* e : engines) app.add_subcommand(e, std::string("run the ") + e + " campaign")->fallthrough();
  app.add_subcommand("validate", "check a config and print it with defaults resolved")->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    CampaignConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (cmd == "validate") {
      std::cerr << "error: validate needs --config\n";
      return exit_code::config_error;
    }
    // The subcommand selects the engine; an `engine` entry in the file only
    // matters for `validate`.
    if (cmd != "validate") cfg.engine = engine_from_string(cmd);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (out_dir) cfg.output.dir = *out_dir;

    if (cmd == "validate") {
      const std::vector<std::string> warnings = cfg.check();
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      std::cout << cfg.to_json().dump(2) << '\n';
      std::cout << "# config_digest: " << cfg.digest() << '\n';
      return exit_code::ok;
    }

    const CampaignResult r = run_campaign(cfg);
    for (const auto& f : r.files) std::cout << f.string() << '\n';
    if (r.partial()) {
      std::cerr << r.failures.size() << " of " << r.n_points << " grid points failed:\n";
      for (const auto& f : r.failures) std::cerr << "  " << f << '\n';
      return exit_code::partial_failure;
    }
    return exit_code::ok;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::runtime_error;
  }
}
