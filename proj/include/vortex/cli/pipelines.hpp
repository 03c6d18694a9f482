#pragma once

#include "vortex/beams.hpp"
#include "vortex/cli/config.hpp"
#include "vortex/fwm.hpp"
#include "vortex/propagation.hpp"

namespace vortex::cli {

// Closed-form geometry of one conversion case.
struct BlueGeometry {
  int ell = 0;
  double r_ell = 0.0;     // input ring radius, m
  double w2 = 0.0;        // input vortex waist, m
  double r12 = 0.0;       // product ring radius at the source plane, m
  double w12 = 0.0;       // product waist, m
  double zrb = 0.0;       // blue Rayleigh range, m
  double rb_at_zb = 0.0;  // propagated ring radius, m
};

BlueGeometry blue_geometry(int ell, double w1, double r0, double beta, double zb,
                           double lambda_b);

// Grid accommodating both rasterized inputs and the blue field propagated to
// max_z; honors explicit grid_n / grid_pitch overrides (0 = auto).
GridParams auto_product_grid(const BlueGeometry& geo, double w1, double max_z, int grid_n,
                             double grid_pitch);

// Rasterized inputs -> product field at the common waist plane.
ComplexFieldGrid make_product_field(const ExperimentConfig& cfg, const BlueGeometry& geo,
                                    const GridParams& grid);

// End-to-end grid counterpart of the closed forms.
struct BluePipelineResult {
  BlueGeometry geometry;
  double r_grid_source = 0.0; // measured product ring at z = 0, m
  double rb_grid = 0.0;       // measured ring after propagating zb, m
  double pitch = 0.0;         // m
  int n = 0;
};

BluePipelineResult run_blue_pipeline(const ExperimentConfig& cfg, int ell);

} // namespace vortex::cli
