#pragma once

#include <memory>
#include <vector>

#include "vortex/beams.hpp"
#include "vortex/grid.hpp"

namespace vortex {

struct AnalyticPropagation {
  double w = 0.0;                // beam width w(z), m
  double curvature_radius = 0.0; // R(z) = z (1 + zR^2/z^2), +inf at the waist
  double gouy = 0.0;             // (|ell|+1) atan(z'/zR), rad
  double ring_radius = 0.0;      // w(z) sqrt(|ell|/2), 0 for ell = 0
};

enum class WidthMethod {
  ring_peak, // peak of the per-axis intensity profile (ring beams)
  d4sigma    // 2 sigma second-moment half-width (ISO-style)
};

struct WidthSample {
  double z = 0.0;
  double radius_vertical = 0.0;
  double radius_horizontal = 0.0;
};

using WidthScan = std::vector<WidthSample>;

namespace prop {

// Closed-form paraxial propagation of a pure mode, z measured as a plane
// position (internally relative to spec.z0).
AnalyticPropagation propagate_analytic(const BeamSpec& spec, double z);

// Angular-spectrum propagation over dz. Unitary on propagating components
// (power conserved, reversible); evanescent components are discarded. Throws
// ApertureOverflowError if the beam, grown by a conservative divergence
// bound, would come within guard_factor of the grid boundary.
ComplexFieldGrid propagate_grid(const ComplexFieldGrid& field, double dz, double guard_factor = 3.0);

// Thin astigmatic lens tilted about the vertical axis: quadratic phase with
// fx = f cos(tilt) along x (tangential) and fy = f / cos(tilt) along y.
ComplexFieldGrid apply_tilted_lens(const ComplexFieldGrid& field, double f, double tilt);

// Horizontal/vertical radii at each requested plane (absolute z).
WidthScan width_scan(const ComplexFieldGrid& field, const std::vector<double>& z_list,
                     WidthMethod method);

// Per-axis width measurement on a single grid at its own plane.
WidthSample measure_widths(const ComplexFieldGrid& field, WidthMethod method);

// Plane minimizing the product of x and y D4sigma widths, located by a
// coarse scan plus golden-section refinement over [z_lo, z_hi].
double find_min_width_product_plane(const ComplexFieldGrid& field, double z_lo, double z_hi);

// Repeated propagation from one source plane: the source spectrum is
// computed once and reused per target plane.
class FieldPropagator {
public:
  explicit FieldPropagator(const ComplexFieldGrid& source, double guard_factor = 3.0);
  ~FieldPropagator();
  FieldPropagator(const FieldPropagator&) = delete;
  FieldPropagator& operator=(const FieldPropagator&) = delete;

  // Field at absolute plane z.
  ComplexFieldGrid to(double z) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace prop
} // namespace vortex
