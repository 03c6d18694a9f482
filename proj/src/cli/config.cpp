#include "vortex/cli/config.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <set>

#include "vortex/errors.hpp"
#include "vortex/fwm.hpp"
#include "vortex/units.hpp"

namespace vortex::cli {

using nlohmann::ordered_json;

double ExperimentConfig::lambda_blue() const {
  return lambda_b > 0.0 ? lambda_b : fwm::blue_wavelength(lambda1, lambda2, lambda_ir);
}

ExperimentConfig default_config(const std::string& command) {
  ExperimentConfig cfg;
  cfg.experiment = command;
  if (command == "radius-sweep") {
    cfg.ell_spec = "1:30";
  } else if (command == "efficiency-sweep") {
    cfg.ell_spec = "-30:-1,1:30";
  } else if (command == "propagation-scan") {
    cfg.ell_spec = "4,8";
  } else if (command == "tilted-lens") {
    cfg.ell_spec = "-11:11";
  } else if (command == "phase-match") {
    cfg.ell_spec = "10";
    cfg.w1 = 0.17e-3;
  } else if (command == "rabi-budget") {
    cfg.ell_spec = "10";
    cfg.w1 = 0.17e-3; // measured drive waist, not the fitted one
  } else {
    throw ValidationError("unknown command '" + command + "'");
  }
  cfg.ells = parse_ell_spec(cfg.ell_spec);
  return cfg;
}

std::vector<int> parse_ell_spec(const std::string& spec) {
  auto parse_int = [&](std::string_view tok) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      throw ValidationError("bad ell token '" + std::string(tok) + "' in '" + spec + "'");
    return v;
  };

  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    std::string_view tok(spec.data() + pos, comma - pos);
    if (tok.empty()) throw ValidationError("empty ell token in '" + spec + "'");
    // a range separator is a ':' (not the leading minus sign)
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos) {
      out.push_back(parse_int(tok));
    } else {
      const int lo = parse_int(tok.substr(0, colon));
      const int hi = parse_int(tok.substr(colon + 1));
      if (lo > hi) throw ValidationError("descending ell range in '" + spec + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw ValidationError("empty ell spec");
  return out;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment",    "lambda1_nm",     "lambda2_nm",    "lambda_ir_um",
      "lambda_b_nm",   "w1_mm",          "r0_mm",         "beta",
      "p1_w",          "p2_w",           "ell",           "grid_n",
      "grid_pitch_um", "zb_mm",          "a_values",      "norm_ell",
      "scan_points",   "scan_span_rayleigh", "scan_z_mm", "scan_source",
      "width_method",  "lens_f_mm",      "lens_tilt_deg", "lens_waist_mm",
      "prominence",
      "max_unambiguous_ell", "omega1_ghz", "omega2_ghz",  "delta_ghz",
      "linewidth_mhz", "ell_b_margin",   "w_points_per_decade", "w_decades",
      "equal_rayleigh", "residual_cutoff", "max_candidates", "fit",
      "pipeline",      "dump_fields",    "threads",       "seed",
      "out_dir"};
  return keys;
}

template <typename T>
T expect(const ordered_json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config key '" + key + "': " + e.what());
  }
}

} // namespace

void apply_json_config(ExperimentConfig& cfg, const ordered_json& doc) {
  if (!doc.is_object()) throw ValidationError("config root must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!known_keys().count(key))
      throw ValidationError("unknown config key '" + key + "'");
  }

  if (doc.contains("experiment")) cfg.experiment = expect<std::string>(doc, "experiment");
  if (doc.contains("lambda1_nm")) cfg.lambda1 = expect<double>(doc, "lambda1_nm") * 1e-9;
  if (doc.contains("lambda2_nm")) cfg.lambda2 = expect<double>(doc, "lambda2_nm") * 1e-9;
  if (doc.contains("lambda_ir_um")) cfg.lambda_ir = expect<double>(doc, "lambda_ir_um") * 1e-6;
  if (doc.contains("lambda_b_nm")) cfg.lambda_b = expect<double>(doc, "lambda_b_nm") * 1e-9;
  if (doc.contains("w1_mm")) cfg.w1 = expect<double>(doc, "w1_mm") * 1e-3;
  if (doc.contains("r0_mm")) cfg.r0 = expect<double>(doc, "r0_mm") * 1e-3;
  if (doc.contains("beta")) cfg.beta = expect<double>(doc, "beta");
  if (doc.contains("p1_w")) cfg.p1 = expect<double>(doc, "p1_w");
  if (doc.contains("p2_w")) cfg.p2 = expect<double>(doc, "p2_w");
  if (doc.contains("ell")) {
    const auto& e = doc.at("ell");
    if (e.is_string()) {
      cfg.ell_spec = e.get<std::string>();
      cfg.ells = parse_ell_spec(cfg.ell_spec);
    } else if (e.is_array()) {
      cfg.ells = expect<std::vector<int>>(doc, "ell");
      cfg.ell_spec.clear();
      for (std::size_t i = 0; i < cfg.ells.size(); ++i)
        cfg.ell_spec += (i ? "," : "") + std::to_string(cfg.ells[i]);
    } else if (e.is_number_integer()) {
      cfg.ells = {e.get<int>()};
      cfg.ell_spec = std::to_string(cfg.ells[0]);
    } else {
      throw ValidationError("config key 'ell' must be a string, array or integer");
    }
  }
  if (doc.contains("grid_n")) cfg.grid_n = expect<int>(doc, "grid_n");
  if (doc.contains("grid_pitch_um")) cfg.grid_pitch = expect<double>(doc, "grid_pitch_um") * 1e-6;
  if (doc.contains("zb_mm")) cfg.zb = expect<double>(doc, "zb_mm") * 1e-3;
  if (doc.contains("a_values")) cfg.a_values = expect<std::vector<double>>(doc, "a_values");
  if (doc.contains("norm_ell")) cfg.norm_ell = expect<int>(doc, "norm_ell");
  if (doc.contains("scan_points")) cfg.scan_points = expect<int>(doc, "scan_points");
  if (doc.contains("scan_span_rayleigh"))
    cfg.scan_span_rayleigh = expect<double>(doc, "scan_span_rayleigh");
  if (doc.contains("scan_z_mm")) {
    cfg.scan_z.clear();
    for (double z : expect<std::vector<double>>(doc, "scan_z_mm")) cfg.scan_z.push_back(z * 1e-3);
  }
  if (doc.contains("scan_source")) cfg.scan_source = expect<std::string>(doc, "scan_source");
  if (doc.contains("width_method")) cfg.width_method = expect<std::string>(doc, "width_method");
  if (doc.contains("lens_f_mm")) cfg.lens_f = expect<double>(doc, "lens_f_mm") * 1e-3;
  if (doc.contains("lens_tilt_deg"))
    cfg.lens_tilt = expect<double>(doc, "lens_tilt_deg") * pi / 180.0;
  if (doc.contains("lens_waist_mm")) cfg.lens_waist = expect<double>(doc, "lens_waist_mm") * 1e-3;
  if (doc.contains("prominence")) cfg.prominence = expect<double>(doc, "prominence");
  if (doc.contains("max_unambiguous_ell"))
    cfg.max_unambiguous_ell = expect<int>(doc, "max_unambiguous_ell");
  if (doc.contains("omega1_ghz")) cfg.omega1 = expect<double>(doc, "omega1_ghz") * 1e9;
  if (doc.contains("omega2_ghz")) cfg.omega2 = expect<double>(doc, "omega2_ghz") * 1e9;
  if (doc.contains("delta_ghz")) cfg.delta = expect<double>(doc, "delta_ghz") * 1e9;
  if (doc.contains("linewidth_mhz")) cfg.linewidth = expect<double>(doc, "linewidth_mhz") * 1e6;
  if (doc.contains("ell_b_margin")) cfg.ell_b_margin = expect<int>(doc, "ell_b_margin");
  if (doc.contains("w_points_per_decade"))
    cfg.w_points_per_decade = expect<int>(doc, "w_points_per_decade");
  if (doc.contains("w_decades")) cfg.w_decades = expect<double>(doc, "w_decades");
  if (doc.contains("equal_rayleigh")) cfg.equal_rayleigh = expect<bool>(doc, "equal_rayleigh");
  if (doc.contains("residual_cutoff")) cfg.residual_cutoff = expect<double>(doc, "residual_cutoff");
  if (doc.contains("max_candidates")) cfg.max_candidates = expect<int>(doc, "max_candidates");
  if (doc.contains("fit")) cfg.fit = expect<bool>(doc, "fit");
  if (doc.contains("pipeline")) cfg.pipeline = expect<bool>(doc, "pipeline");
  if (doc.contains("dump_fields")) cfg.dump_fields = expect<bool>(doc, "dump_fields");
  if (doc.contains("threads")) cfg.threads = expect<int>(doc, "threads");
  if (doc.contains("seed")) cfg.seed = expect<std::uint64_t>(doc, "seed");
  if (doc.contains("out_dir")) cfg.out_dir = expect<std::string>(doc, "out_dir");
}

void apply_json_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // parse_error.byte gives the offset; report it for navigation
    throw ValidationError(path.string() + ": " + e.what());
  }
  apply_json_config(cfg, doc);
}

ordered_json ExperimentConfig::echo() const {
  ordered_json doc;
  doc["experiment"] = experiment;
  doc["lambda1_nm"] = lambda1 * 1e9;
  doc["lambda2_nm"] = lambda2 * 1e9;
  doc["lambda_ir_um"] = lambda_ir * 1e6;
  doc["lambda_b_nm"] = lambda_blue() * 1e9;
  doc["w1_mm"] = w1 * 1e3;
  doc["r0_mm"] = r0 * 1e3;
  doc["beta"] = beta;
  doc["p1_w"] = p1;
  doc["p2_w"] = p2;
  doc["ell"] = ells;
  doc["grid_n"] = grid_n;
  doc["grid_pitch_um"] = grid_pitch * 1e6;
  doc["zb_mm"] = zb * 1e3;
  doc["a_values"] = a_values;
  doc["norm_ell"] = norm_ell;
  doc["scan_points"] = scan_points;
  doc["scan_span_rayleigh"] = scan_span_rayleigh;
  {
    ordered_json z = ordered_json::array();
    for (double v : scan_z) z.push_back(v * 1e3);
    doc["scan_z_mm"] = z;
  }
  doc["scan_source"] = scan_source;
  doc["width_method"] = width_method;
  doc["lens_f_mm"] = lens_f * 1e3;
  doc["lens_tilt_deg"] = lens_tilt * 180.0 / pi;
  doc["lens_waist_mm"] = lens_waist * 1e3;
  doc["prominence"] = prominence;
  doc["max_unambiguous_ell"] = max_unambiguous_ell;
  doc["omega1_ghz"] = omega1 * 1e-9;
  doc["omega2_ghz"] = omega2 * 1e-9;
  doc["delta_ghz"] = delta * 1e-9;
  doc["linewidth_mhz"] = linewidth * 1e-6;
  doc["ell_b_margin"] = ell_b_margin;
  doc["w_points_per_decade"] = w_points_per_decade;
  doc["w_decades"] = w_decades;
  doc["equal_rayleigh"] = equal_rayleigh;
  doc["residual_cutoff"] = residual_cutoff;
  doc["max_candidates"] = max_candidates;
  doc["fit"] = fit;
  doc["pipeline"] = pipeline;
  doc["dump_fields"] = dump_fields;
  doc["threads"] = threads;
  doc["seed"] = seed;
  // out_dir is deliberately not echoed: the echo documents the experiment,
  // not the destination, and reruns into fresh directories must match
  return doc;
}

void validate_config(const ExperimentConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
  };
  require(cfg.lambda1 > 0 && cfg.lambda2 > 0 && cfg.lambda_ir > 0,
          "wavelengths must be > 0");
  require(cfg.lambda_blue() > 0, "derived blue wavelength is not positive");
  require(cfg.w1 > 0, "w1_mm must be > 0");
  require(cfg.r0 > 0, "r0_mm must be > 0");
  require(cfg.beta >= 0, "beta must be >= 0");
  require(cfg.p1 >= 0 && cfg.p2 >= 0, "powers must be >= 0");
  require(!cfg.ells.empty(), "ell sweep is empty");
  require(cfg.zb >= 0, "zb_mm must be >= 0");
  require(cfg.threads >= 0, "threads must be >= 0");
  if (cfg.grid_n != 0)
    require(cfg.grid_n >= 256 && std::has_single_bit(unsigned(cfg.grid_n)),
            "grid_n must be a power of two >= 256");
  require(cfg.grid_pitch >= 0, "grid_pitch_um must be >= 0");
  require(cfg.width_method == "ring-peak" || cfg.width_method == "d4sigma",
          "width_method must be 'ring-peak' or 'd4sigma'");
  require(cfg.scan_source == "product" || cfg.scan_source == "analytic-lg",
          "scan_source must be 'product' or 'analytic-lg'");

  const bool vortex_sweep =
      cfg.experiment == "radius-sweep" || cfg.experiment == "efficiency-sweep";
  if (vortex_sweep)
    for (int ell : cfg.ells)
      require(ell != 0, "ell = 0 is excluded from vortex sweeps (no ring radius)");

  if (cfg.experiment == "efficiency-sweep") {
    require(!cfg.a_values.empty(), "a_values must not be empty");
    for (double a : cfg.a_values) require(a > 0, "a_values entries must be > 0");
    require(cfg.norm_ell != 0, "norm_ell must be nonzero");
  }
  if (cfg.experiment == "propagation-scan") {
    require(cfg.scan_z.empty() ? cfg.scan_points >= 5 : cfg.scan_z.size() >= 5,
            "propagation scan needs >= 5 planes for the hyperbola fit");
    require(cfg.scan_span_rayleigh > 0, "scan_span_rayleigh must be > 0");
  }
  if (cfg.experiment == "tilted-lens") {
    require(cfg.lens_f > 0, "lens_f_mm must be > 0");
    require(cfg.lens_tilt >= 0 && cfg.lens_tilt < pi / 2, "lens tilt must lie in [0, 90) deg");
    require(cfg.lens_waist > 0, "lens_waist_mm must be > 0");
    require(cfg.prominence > 0 && cfg.prominence < 1, "prominence must lie in (0, 1)");
  }
  if (cfg.experiment == "rabi-budget") {
    require(cfg.delta != 0, "delta_ghz must be nonzero");
    require(cfg.linewidth > 0, "linewidth_mhz must be > 0");
  }
  if (cfg.experiment == "phase-match") {
    require(cfg.ell_b_margin >= 0, "ell_b_margin must be >= 0");
    require(cfg.residual_cutoff >= 0, "residual_cutoff must be >= 0 (0 = auto)");
    require(cfg.w_points_per_decade > 0, "w_points_per_decade must be > 0");
    require(cfg.w_decades > 0, "w_decades must be > 0");
    require(cfg.max_candidates > 0, "max_candidates must be > 0");
  }
}

} // namespace vortex::cli
