#pragma once

#include <filesystem>

#include "vortex/cli/config.hpp"
#include "vortex/grid.hpp"

namespace vortex::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Dispatch cfg.experiment; creates cfg.out_dir, writes config-echo.json, the
// command's CSV/JSON/SVG outputs and a run.log with version and wall time.
void run_command(const ExperimentConfig& cfg);

void cmd_radius_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void cmd_efficiency_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void cmd_propagation_scan(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void cmd_tilted_lens(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void cmd_phase_match(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void cmd_rabi_budget(const ExperimentConfig& cfg, const std::filesystem::path& dir);

// Tilted-lens pipeline for one charge: rasterize the blue mode, apply the
// tilted lens, observe at the minimum-width-product plane. Returns the
// observation-plane field.
ComplexFieldGrid tilted_lens_pattern(double waist, double lambda, int ell, double f,
                                     double tilt);

} // namespace vortex::cli
