#include "vortex/cli/pipelines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "vortex/analysis.hpp"
#include "vortex/units.hpp"

namespace vortex::cli {

BlueGeometry blue_geometry(int ell, double w1, double r0, double beta, double zb,
                           double lambda_b) {
  BlueGeometry g;
  g.ell = ell;
  g.r_ell = beams::radius_model(ell, {r0, beta});
  g.w2 = beams::waist_from_ring(g.r_ell, ell);
  g.r12 = fwm::blue_ring_radius(g.r_ell, ell, w1);
  g.w12 = fwm::combined_waist(w1, g.w2);
  g.zrb = beams::rayleigh_range(g.w12, lambda_b);
  g.rb_at_zb = fwm::observed_blue_radius(g.r12, g.w12, zb, lambda_b);
  return g;
}

GridParams auto_product_grid(const BlueGeometry& geo, double w1, double max_z, int grid_n,
                             double grid_pitch) {
  // pitch: keep both inputs sampled, including the ring winding
  double pitch_req = std::min(w1, geo.w2) / 8.0;
  if (geo.ell != 0)
    pitch_req = std::min(pitch_req, geo.r_ell / (4.0 * std::abs(geo.ell)));

  // extent: the rasterization rule for the inputs, plus room for the blue
  // field grown to max_z
  const double input_half = 3.0 * std::max({w1, geo.w2, geo.r_ell}) * 1.02;
  const double zeta = max_z / geo.zrb;
  const double growth = std::sqrt(1.0 + zeta * zeta);
  const double blue_half = 3.0 * std::max(geo.r12, geo.w12) * growth * 1.12;
  const double extent = 2.0 * std::max(input_half, blue_half);

  GridParams grid;
  if (grid_n > 0) {
    grid.n = grid_n;
  } else {
    const double ratio = extent / pitch_req;
    grid.n = std::max(256, int(std::bit_ceil(std::uint64_t(std::ceil(ratio)))));
    grid.n = std::min(grid.n, 4096);
  }
  grid.pitch = grid_pitch > 0.0 ? grid_pitch : extent / grid.n;
  return grid;
}

ComplexFieldGrid make_product_field(const ExperimentConfig& cfg, const BlueGeometry& geo,
                                    const GridParams& grid) {
  const BeamSpec pump{cfg.lambda1, cfg.w1, 0, 0, cfg.p1, 0.0};
  const BeamSpec vortex{cfg.lambda2, geo.w2, geo.ell, 0, cfg.p2, 0.0};
  const auto e1 = beams::rasterize(pump, grid);
  const auto e2 = beams::rasterize(vortex, grid);
  FwmConfig fwm_cfg;
  fwm_cfg.lambda_ir = cfg.lambda_ir;
  return fwm::product_field(e1, e2, fwm_cfg);
}

BluePipelineResult run_blue_pipeline(const ExperimentConfig& cfg, int ell) {
  const double lambda_b = cfg.lambda_blue();
  BluePipelineResult out;
  out.geometry = blue_geometry(ell, cfg.w1, cfg.r0, cfg.beta, cfg.zb, lambda_b);

  const GridParams grid =
      auto_product_grid(out.geometry, cfg.w1, cfg.zb, cfg.grid_n, cfg.grid_pitch);
  out.n = grid.n;
  out.pitch = grid.pitch;

  ComplexFieldGrid blue = make_product_field(cfg, out.geometry, grid);
  out.r_grid_source = analysis::measure_ring_radius(blue).radius;
  if (cfg.zb > 0.0) {
    blue = prop::propagate_grid(blue, cfg.zb);
    out.rb_grid = analysis::measure_ring_radius(blue).radius;
  } else {
    out.rb_grid = out.r_grid_source;
  }
  return out;
}

} // namespace vortex::cli
