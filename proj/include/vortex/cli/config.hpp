#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vortex/units.hpp"

namespace vortex::cli {

// One experiment run, fully resolved. Values are SI internally; the JSON
// keys carry explicit unit suffixes (w1_mm, zb_mm, omega1_ghz, ...).
// Precedence: built-in defaults < per-command defaults < config file < CLI
// flags.
struct ExperimentConfig {
  std::string experiment;

  // beams
  double lambda1 = 780e-9;
  double lambda2 = 776e-9;
  double lambda_ir = 5.23e-6;
  double lambda_b = 0.0; // 0 = derive from the other three
  double w1 = 0.15e-3;
  double r0 = 0.045e-3;
  double beta = 0.51;
  double p1 = 0.1;
  double p2 = 0.1;

  // sweep
  std::string ell_spec; // "1:30", "-11:11", "2,4,8", ...
  std::vector<int> ells;

  // grids
  int grid_n = 0;          // 0 = auto
  double grid_pitch = 0.0; // 0 = auto, m

  // propagation / detection
  double zb = 0.4;
  std::vector<double> a_values = {0.15, 0.26};
  int norm_ell = 5;
  int scan_points = 11;
  double scan_span_rayleigh = 2.0;
  std::vector<double> scan_z; // explicit planes (m); overrides the span rule
  std::string scan_source = "product"; // or "analytic-lg"
  std::string width_method = "ring-peak"; // or "d4sigma"
  double lens_f = 0.5;
  double lens_tilt = 25.0 * pi / 180.0;
  double lens_waist = 0.2e-3; // beam size arriving (collimated) at the lens
  double prominence = 0.2;
  int max_unambiguous_ell = 11;

  // two-photon budget
  double omega1 = 1.6e9;
  double omega2 = 0.2e9;
  double delta = 1.5e9;
  double linewidth = 0.4e6;

  // phase matching
  int ell_b_margin = 3; // search ell_b in [min(0,ell)-margin, max(0,ell)+margin]
  int w_points_per_decade = 200;
  double w_decades = 3.0;
  bool equal_rayleigh = false;
  double residual_cutoff = 0.0; // 0 = auto
  int max_candidates = 200;

  // run control
  bool fit = true;
  bool pipeline = true;
  bool dump_fields = false;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "run-out";

  // Resolved blue wavelength.
  double lambda_blue() const;

  // Fully-resolved echo in the unit-suffixed key space, stable key order.
  nlohmann::ordered_json echo() const;
};

// Per-command defaults (e.g. rabi-budget quotes the measured w1 = 0.17 mm,
// the radius fits use the fitted 0.15 mm).
ExperimentConfig default_config(const std::string& command);

// Apply a JSON document; unknown keys and type mismatches raise
// ValidationError with the offending key.
void apply_json_config(ExperimentConfig& cfg, const nlohmann::ordered_json& doc);
void apply_json_file(ExperimentConfig& cfg, const std::filesystem::path& path);

// "a:b" (inclusive), comma-joined, e.g. "-30:-1,1:30" or "2,4,8".
std::vector<int> parse_ell_spec(const std::string& spec);

// Cross-field checks for one command; throws ValidationError.
void validate_config(const ExperimentConfig& cfg);

} // namespace vortex::cli
