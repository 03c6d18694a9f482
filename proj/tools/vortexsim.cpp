// Command-line driver: reproducible conversion, propagation and diagnostic
// sweeps from a JSON config. Exit codes: 0 success, 2 validation error,
// 3 numeric failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vortex/cli/commands.hpp"
#include "vortex/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string ell_spec;
  int grid_n = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void attach_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "JSON config file");
  sub->add_option("--out", flags.out_dir, "output directory");
  sub->add_option("--ell", flags.ell_spec, "charge sweep, e.g. 1:30 or -11:11 or 2,4,8");
  sub->add_option("--grid-n", flags.grid_n, "grid side (power of two >= 256, 0 = auto)");
  sub->add_option("--seed", flags.seed, "RNG seed recorded with the run")
      ->each([&](const std::string&) { flags.seed_set = true; });
}

int run(const std::string& command, const CommonFlags& flags) {
  auto cfg = vortex::cli::default_config(command);
  if (!flags.config_path.empty()) vortex::cli::apply_json_file(cfg, flags.config_path);
  cfg.experiment = command; // the subcommand wins over the config file
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.ell_spec.empty()) {
    cfg.ell_spec = flags.ell_spec;
    cfg.ells = vortex::cli::parse_ell_spec(flags.ell_spec);
  }
  if (flags.grid_n != 0) cfg.grid_n = flags.grid_n;
  if (flags.seed_set) cfg.seed = flags.seed;

  vortex::cli::run_command(cfg);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortexsim: wave-optics sweeps for red-to-blue optical-vortex conversion"};
  app.set_version_flag("--version", std::string(vortex::cli::kToolVersion));
  app.require_subcommand(1);

  const char* commands[] = {"radius-sweep",  "efficiency-sweep", "propagation-scan",
                            "tilted-lens",   "phase-match",      "rabi-budget"};
  const char* descriptions[] = {
      "input/output ring radii vs charge, closed form and grid pipeline",
      "normalized conversion efficiency vs charge",
      "blue-beam width scan and hyperbola/M2 fits",
      "tilted-lens fringe counting over a charge sweep",
      "Gouy phase-matching candidate table",
      "two-photon Rabi budget report"};

  CommonFlags flags[6];
  for (int i = 0; i < 6; ++i) attach_common(app.add_subcommand(commands[i], descriptions[i]), flags[i]);

  CLI11_PARSE(app, argc, argv);

  try {
    for (int i = 0; i < 6; ++i)
      if (app.get_subcommand(commands[i])->parsed()) return run(commands[i], flags[i]);
    std::cerr << "no command selected\n";
    return 2;
  } catch (const vortex::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
