#include "vortex/cli/commands.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>

#include "vortex/analysis.hpp"
#include "vortex/cli/csv.hpp"
#include "vortex/cli/format.hpp"
#include "vortex/cli/parallel.hpp"
#include "vortex/cli/pipelines.hpp"
#include "vortex/cli/svg.hpp"
#include "vortex/units.hpp"

namespace vortex::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_json(const fs::path& path, const ordered_json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

ordered_json fit_json(const std::string& model, const std::vector<std::string>& names,
                      const FitResult& fit, std::size_t n_points) {
  ordered_json doc;
  doc["model"] = model;
  doc["params"] = fit.params;
  std::vector<double> sigmas;
  for (std::size_t i = 0; i < fit.params.size(); ++i)
    sigmas.push_back(std::sqrt(std::max(fit.covariance[i][i], 0.0)));
  doc["sigmas"] = sigmas;
  doc["rms"] = fit.residual_rms;
  doc["converged"] = fit.converged;
  doc["n_points"] = n_points;
  doc["param_names"] = names;
  doc["covariance"] = fit.covariance;
  doc["iterations"] = fit.iterations;
  return doc;
}

ordered_json hyperbola_json(const HyperbolaFit& fit, std::size_t n_points) {
  ordered_json doc;
  doc["model"] = "hyperbola";
  doc["params"] = {fit.w0, fit.z0, fit.zr};
  doc["sigmas"] = {std::sqrt(std::max(fit.covariance[0][0], 0.0)),
                   std::sqrt(std::max(fit.covariance[1][1], 0.0)),
                   std::sqrt(std::max(fit.covariance[2][2], 0.0))};
  doc["rms"] = fit.residual_rms;
  doc["converged"] = fit.converged;
  doc["n_points"] = n_points;
  doc["param_names"] = {"w0_m", "z0_m", "zr_m"};
  ordered_json cov = ordered_json::array();
  for (const auto& row : fit.covariance) cov.push_back({row[0], row[1], row[2]});
  doc["covariance"] = cov;
  doc["m2"] = fit.m2;
  doc["m2_sigma"] = fit.m2_sigma;
  doc["iterations"] = fit.iterations;
  return doc;
}

// Intensity snapshot, binary PGM (P5, 8 bit), resampled to out_n^2 over a
// crop centered on the centroid.
void write_pgm(const fs::path& path, const ComplexFieldGrid& field, int out_n = 256) {
  const auto [cx, cy] = field.centroid();
  // crop to the region holding signal, with margin
  double max_i = 0.0;
  for (const auto& v : field.data) max_i = std::max(max_i, std::norm(v));
  if (max_i <= 0.0) max_i = 1.0;
  double half = 0.0;
  for (int iy = 0; iy < field.n; ++iy)
    for (int ix = 0; ix < field.n; ++ix)
      if (std::norm(field.at(ix, iy)) > 1e-4 * max_i)
        half = std::max({half, std::abs(field.x(ix) - cx), std::abs(field.y(iy) - cy)});
  half = std::max(half * 1.15, 4.0 * field.pitch);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "P5\n" << out_n << ' ' << out_n << "\n255\n";
  std::vector<unsigned char> row(std::size_t(out_n), 0);
  for (int j = 0; j < out_n; ++j) {
    const double py = cy - half + 2.0 * half * j / (out_n - 1);
    for (int i = 0; i < out_n; ++i) {
      const double px = cx - half + 2.0 * half * i / (out_n - 1);
      const double rel = std::norm(field.sample_bilinear(px, py)) / max_i;
      row[std::size_t(i)] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(rel, 0.0, 1.0)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), out_n);
  }
}

fs::path prepare_run_dir(const ExperimentConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_json(dir / "config-echo.json", cfg.echo());
  return dir;
}

int sgn(int v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

} // namespace

void cmd_radius_sweep(const ExperimentConfig& cfg, const fs::path& dir) {
  struct Row {
    BluePipelineResult pipe;
  };
  std::vector<Row> rows(cfg.ells.size());
  parallel_for(cfg.ells.size(), cfg.threads, [&](std::size_t i) {
    if (cfg.pipeline) {
      rows[i].pipe = run_blue_pipeline(cfg, cfg.ells[i]);
    } else {
      rows[i].pipe.geometry =
          blue_geometry(cfg.ells[i], cfg.w1, cfg.r0, cfg.beta, cfg.zb, cfg.lambda_blue());
    }
  });

  CsvWriter csv(dir / "radius_sweep.csv",
                {"ell", "R_ell_input_m", "R12_m", "R_b_at_zb_m", "R_b_grid_measured_m"});
  std::vector<double> xs, r_in, rb_closed, rb_grid;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& g = rows[i].pipe.geometry;
    csv.row({fmt_int(cfg.ells[i]), fmt_double(g.r_ell), fmt_double(g.r12),
             fmt_double(g.rb_at_zb),
             cfg.pipeline ? fmt_double(rows[i].pipe.rb_grid) : std::string()});
    xs.push_back(g.ell);
    r_in.push_back(g.r_ell * 1e3);
    rb_closed.push_back(g.rb_at_zb * 1e3);
    if (cfg.pipeline) rb_grid.push_back(rows[i].pipe.rb_grid * 1e3);

    if (cfg.pipeline) {
      const double diff = std::abs(rows[i].pipe.rb_grid - g.rb_at_zb);
      if (diff > rows[i].pipe.pitch)
        throw NumericError("grid pipeline deviates from the closed form by " +
                           fmt_double(diff) + " m at ell = " + fmt_int(g.ell) +
                           " (pitch " + fmt_double(rows[i].pipe.pitch) + " m)");
    }
  }

  SvgPlot plot("Ring radii vs charge", "ell", "radius (mm)");
  plot.add_points("input ring", xs, r_in);
  plot.add_line("blue, closed form", xs, rb_closed);
  if (cfg.pipeline) plot.add_points("blue, grid pipeline", xs, rb_grid);
  plot.write(dir / "radius_sweep.svg");

  // recover (w1, r0) from the measured blue column, beta held fixed
  if (cfg.fit && rows.size() >= 4) {
    std::vector<std::pair<int, double>> data;
    for (const auto& row : rows)
      data.emplace_back(row.pipe.geometry.ell,
                        cfg.pipeline ? row.pipe.rb_grid : row.pipe.geometry.rb_at_zb);
    const auto fit = analysis::fit_blue_radius_model(data, cfg.zb, cfg.beta,
                                                     cfg.lambda_blue(), cfg.w1, cfg.r0);
    ordered_json doc = fit_json("blue-ring-radius", {"w1_m", "r0_m"}, fit, data.size());
    doc["beta_fixed"] = cfg.beta;
    doc["zb_m"] = cfg.zb;
    write_json(dir / "blue_radius_fit.json", doc);
  }
}

void cmd_efficiency_sweep(const ExperimentConfig& cfg, const fs::path& dir) {
  SvgPlot plot("Conversion efficiency vs charge", "ell", "eta (normalized)");
  plot.set_log_y(true);
  for (double a : cfg.a_values) {
    const auto curve =
        fwm::efficiency_curve(cfg.ells, a, cfg.beta, cfg.w1, cfg.p1, cfg.p2, cfg.norm_ell);
    char name[64];
    std::snprintf(name, sizeof name, "efficiency_a%g.csv", a);
    CsvWriter csv(dir / name, {"ell", "K_ell_W2_per_m2", "eta_normalized"});
    std::vector<double> xs, ys;
    for (const auto& pt : curve) {
      csv.row({fmt_int(pt.ell), fmt_double(pt.k_ell), fmt_double(pt.eta)});
      xs.push_back(pt.ell);
      ys.push_back(pt.eta);
    }
    std::snprintf(name, sizeof name, "a = %g", a);
    plot.add_points(name, xs, ys);
  }
  plot.write(dir / "efficiency.svg");
}

void cmd_propagation_scan(const ExperimentConfig& cfg, const fs::path& dir) {
  const double lambda_b = cfg.lambda_blue();
  const WidthMethod method =
      cfg.width_method == "d4sigma" ? WidthMethod::d4sigma : WidthMethod::ring_peak;

  SvgPlot plot("Blue beam propagation", "z (mm)", "radius (mm)");
  ordered_json fits = ordered_json::array();

  for (int ell : cfg.ells) {
    const BlueGeometry geo = ell == 0
                                 ? BlueGeometry{0, 0.0, cfg.w1, 0.0,
                                                fwm::combined_waist(cfg.w1, cfg.w1),
                                                beams::rayleigh_range(
                                                    fwm::combined_waist(cfg.w1, cfg.w1), lambda_b),
                                                0.0}
                                 : blue_geometry(ell, cfg.w1, cfg.r0, cfg.beta, 0.0, lambda_b);

    std::vector<double> z_list = cfg.scan_z;
    if (z_list.empty()) {
      for (int i = 0; i < cfg.scan_points; ++i)
        z_list.push_back(cfg.scan_span_rayleigh * geo.zrb * i / (cfg.scan_points - 1));
    }
    if (z_list.size() < 5)
      throw ValidationError("propagation scan needs >= 5 planes for the hyperbola fit");
    const double z_max = *std::max_element(z_list.begin(), z_list.end());

    WidthScan scan;
    if (cfg.scan_source == "analytic-lg") {
      const BeamSpec blue{lambda_b, geo.w12, ell, 0, 1.0, 0.0};
      for (double z : z_list) {
        const auto p = prop::propagate_analytic(blue, z);
        const double radius = ell == 0 ? p.w : p.ring_radius;
        scan.push_back({z, radius, radius});
      }
    } else {
      const GridParams grid = auto_product_grid(geo, cfg.w1, z_max, cfg.grid_n, cfg.grid_pitch);
      const ComplexFieldGrid blue = make_product_field(cfg, geo, grid);
      scan = prop::width_scan(blue, z_list, method);
    }

    char name[64];
    std::snprintf(name, sizeof name, "scan_ell%d.csv", ell);
    CsvWriter csv(dir / name, {"z_m", "radius_horizontal_m", "radius_vertical_m"});
    std::vector<double> zs, rh, rv;
    for (const auto& s : scan) {
      csv.row({fmt_double(s.z), fmt_double(s.radius_horizontal), fmt_double(s.radius_vertical)});
      zs.push_back(s.z * 1e3);
      rh.push_back(s.radius_horizontal * 1e3);
      rv.push_back(s.radius_vertical * 1e3);
    }
    std::snprintf(name, sizeof name, "ell=%d horizontal", ell);
    plot.add_points(name, zs, rh);
    std::snprintf(name, sizeof name, "ell=%d vertical", ell);
    plot.add_points(name, zs, rv);

    if (cfg.fit) {
      const auto pair = analysis::fit_hyperbola(scan, lambda_b, ell);
      ordered_json entry;
      entry["ell"] = ell;
      entry["lambda_b_nm"] = lambda_b * 1e9;
      entry["horizontal"] = hyperbola_json(pair.horizontal, scan.size());
      entry["vertical"] = hyperbola_json(pair.vertical, scan.size());
      fits.push_back(entry);

      // fitted curve overlay
      std::vector<double> fz, fr;
      const double s = ell == 0 ? 1.0 : std::sqrt(std::abs(ell) / 2.0);
      for (int i = 0; i <= 60; ++i) {
        const double z = z_list.front() + (z_max - z_list.front()) * i / 60.0;
        const double t = (z - pair.horizontal.z0) / pair.horizontal.zr;
        fz.push_back(z * 1e3);
        fr.push_back(s * pair.horizontal.w0 * std::sqrt(1.0 + t * t) * 1e3);
      }
      std::snprintf(name, sizeof name, "ell=%d fit", ell);
      plot.add_line(name, fz, fr);
    }
  }

  if (cfg.fit) write_json(dir / "hyperbola_fits.json", fits);
  plot.write(dir / "propagation.svg");
}

ComplexFieldGrid tilted_lens_pattern(double waist, double lambda, int ell, double f,
                                     double tilt) {
  // the pattern is read out between the two geometric line foci fx and fy,
  // where the accumulated astigmatic Gouy difference has saturated; closer
  // to the beam-waist image the chain is still forming and miscounts
  const double ring = ell == 0 ? 0.0 : waist * std::sqrt(std::abs(ell) / 2.0);
  const double zr = beams::rayleigh_range(waist, lambda);

  const double fx = f * std::cos(tilt);
  const double fy = f / std::cos(tilt);
  const double z_hi = 1.05 * fy;

  double pitch_req = waist / 8.0;
  if (ell != 0) pitch_req = std::min(pitch_req, ring / (4.0 * std::abs(ell)));
  // second-moment growth out to the far edge of the search bracket
  const double spread = std::sqrt(std::pow(1.0 - z_hi / f, 2) + std::pow(z_hi / zr, 2));
  const double extent = 6.0 * std::max(waist, ring) * std::max(1.0, spread) * 1.15;
  const int n = std::clamp(
      int(std::bit_ceil(std::uint64_t(std::ceil(extent / pitch_req)))), 256, 4096);

  GridParams grid;
  grid.n = n;
  grid.pitch = extent / n;
  const BeamSpec spec{lambda, waist, ell, 0, 1.0, 0.0};
  ComplexFieldGrid field = beams::rasterize(spec, grid);
  field = prop::apply_tilted_lens(field, f, tilt);

  const double z_obs = prop::find_min_width_product_plane(field, 0.95 * fx, z_hi);
  return prop::propagate_grid(field, z_obs);
}

void cmd_tilted_lens(const ExperimentConfig& cfg, const fs::path& dir) {
  const double lambda_b = cfg.lambda_blue();

  struct Result {
    ordered_json record;
    ComplexFieldGrid pattern;
  };
  std::vector<Result> results(cfg.ells.size());

  parallel_for(cfg.ells.size(), cfg.threads, [&](std::size_t i) {
    const int ell = cfg.ells[i];
    const double waist = cfg.lens_waist;
    ordered_json rec;
    rec["ell_true"] = ell;
    rec["waist_mm"] = waist * 1e3;
    rec["high_ell_regime"] = std::abs(ell) > cfg.max_unambiguous_ell;
    ComplexFieldGrid pattern = tilted_lens_pattern(waist, lambda_b, ell, cfg.lens_f, cfg.lens_tilt);
    try {
      const auto fringes = analysis::count_dark_fringes(pattern, 0.0, cfg.prominence);
      rec["count"] = fringes.count;
      rec["sign"] = fringes.sign;
      rec["low_contrast"] = false;
      rec["agree"] =
          fringes.count == std::abs(ell) && (ell == 0 || fringes.sign == sgn(ell));
    } catch (const LowContrastError&) {
      rec["count"] = nullptr;
      rec["sign"] = 0;
      rec["low_contrast"] = true;
      rec["agree"] = false;
    }
    results[i] = {std::move(rec), std::move(pattern)};
  });

  int agree = 0, unambiguous = 0;
  ordered_json records = ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const int ell = cfg.ells[i];
    records.push_back(results[i].record);
    if (std::abs(ell) <= cfg.max_unambiguous_ell) {
      ++unambiguous;
      if (results[i].record["agree"].get<bool>()) ++agree;
    }
    char name[64];
    std::snprintf(name, sizeof name, "pattern_ell%d.pgm", ell);
    write_pgm(dir / name, results[i].pattern);
    if (cfg.dump_fields) {
      std::snprintf(name, sizeof name, "pattern_ell%d.ofgd", ell);
      write_ofgd(results[i].pattern, dir / name);
    }
  }

  ordered_json doc;
  doc["records"] = records;
  doc["unambiguous_cases"] = unambiguous;
  doc["unambiguous_agree"] = agree;
  doc["accuracy"] = unambiguous > 0 ? double(agree) / unambiguous : 0.0;
  write_json(dir / "tilted_lens.json", doc);
}

void cmd_phase_match(const ExperimentConfig& cfg, const fs::path& dir) {
  FourWavelengths wl{cfg.lambda1, cfg.lambda2, cfg.lambda_b, cfg.lambda_ir};

  ordered_json per_ell = ordered_json::array();
  for (int ell : cfg.ells) {
    GouySearch search;
    search.ell_b_min = std::min(0, ell) - cfg.ell_b_margin;
    search.ell_b_max = std::max(0, ell) + cfg.ell_b_margin;
    search.w_center = cfg.w1;
    search.decades = cfg.w_decades;
    search.points_per_decade = cfg.w_points_per_decade;
    search.equal_rayleigh = cfg.equal_rayleigh;
    search.rel_cutoff = cfg.residual_cutoff;

    const double zr1 = beams::rayleigh_range(cfg.w1, cfg.lambda1);
    double w2;
    if (cfg.equal_rayleigh) {
      w2 = std::sqrt(cfg.lambda2 * zr1 / pi); // matched Rayleigh range
    } else if (ell == 0) {
      w2 = cfg.w1;
    } else {
      w2 = beams::waist_from_ring(beams::radius_model(ell, {cfg.r0, cfg.beta}), ell);
    }

    const auto candidates = fwm::gouy_candidates(cfg.w1, w2, ell, wl, search);

    bool boyd_verified = !candidates.empty();
    bool main_channel = false; // (ell_b = ell, ell_ir = 0) with w_ir >> w1
    ordered_json table = ordered_json::array();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& c = candidates[i];
      if (!c.boyd_exact) boyd_verified = false;
      if (c.ell_b == ell && c.ell_ir == 0 && c.w_ir >= 10.0 * cfg.w1) main_channel = true;
      if (int(i) < cfg.max_candidates)
        table.push_back({{"ell_b", c.ell_b},
                         {"ell_ir", c.ell_ir},
                         {"w_b_mm", c.w_b * 1e3},
                         {"w_ir_mm", c.w_ir * 1e3},
                         {"gouy_residual_per_m", c.gouy_residual},
                         {"boyd_exact", c.boyd_exact}});
    }

    ordered_json entry;
    entry["ell"] = ell;
    entry["w1_mm"] = cfg.w1 * 1e3;
    entry["w2_mm"] = w2 * 1e3;
    entry["equal_rayleigh"] = cfg.equal_rayleigh;
    entry["n_candidates"] = candidates.size();
    entry["boyd_sum_rule_all"] = boyd_verified;
    entry["gaussian_ir_channel_with_wide_waist"] = main_channel;
    if (candidates.empty()) entry["warning"] = "no candidates within the search bounds";
    entry["candidates"] = table;
    per_ell.push_back(entry);
  }

  ordered_json doc;
  doc["lambda_b_nm"] = cfg.lambda_blue() * 1e9;
  doc["results"] = per_ell;
  write_json(dir / "phase_match.json", doc);
}

void cmd_rabi_budget(const ExperimentConfig& cfg, const fs::path& dir) {
  ordered_json per_ell = ordered_json::array();
  for (int ell : cfg.ells) {
    const double r_ell =
        ell == 0 ? 0.0 : beams::radius_model(ell, {cfg.r0, cfg.beta});
    RabiBudget budget;
    budget.omega1_peak = cfg.omega1;
    budget.omega2 = cfg.omega2;
    budget.delta = cfg.delta;
    budget.radius = r_ell;
    budget.w1 = cfg.w1;
    const auto rabi = beams::effective_two_photon_rabi(budget);

    ordered_json entry;
    entry["ell"] = ell;
    entry["r_ell_mm"] = r_ell * 1e3;
    entry["omega1_peak_ghz"] = cfg.omega1 * 1e-9;
    entry["omega1_at_ring_ghz"] = rabi.omega1_at_r * 1e-9;
    entry["omega2_ghz"] = cfg.omega2 * 1e-9;
    entry["delta_ghz"] = cfg.delta * 1e-9;
    entry["omega_eff_mhz"] = rabi.omega_eff * 1e-6;
    entry["adiabaticity_ratio"] = rabi.adiabaticity;
    entry["linewidth_mhz"] = cfg.linewidth * 1e-6;
    entry["omega_eff_over_linewidth"] = rabi.omega_eff / cfg.linewidth;
    per_ell.push_back(entry);
  }
  ordered_json doc;
  doc["results"] = per_ell;
  write_json(dir / "rabi_budget.json", doc);
}

void run_command(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = prepare_run_dir(cfg);

  if (cfg.experiment == "radius-sweep")
    cmd_radius_sweep(cfg, dir);
  else if (cfg.experiment == "efficiency-sweep")
    cmd_efficiency_sweep(cfg, dir);
  else if (cfg.experiment == "propagation-scan")
    cmd_propagation_scan(cfg, dir);
  else if (cfg.experiment == "tilted-lens")
    cmd_tilted_lens(cfg, dir);
  else if (cfg.experiment == "phase-match")
    cmd_phase_match(cfg, dir);
  else if (cfg.experiment == "rabi-budget")
    cmd_rabi_budget(cfg, dir);
  else
    throw ValidationError("unknown command '" + cfg.experiment + "'");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream log(dir / "run.log");
  log << "vortexsim " << kToolVersion << "\nexperiment: " << cfg.experiment
      << "\nwall_seconds: " << wall << '\n';
}

} // namespace vortex::cli
