#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "vortex/fit.hpp"
#include "vortex/grid.hpp"
#include "vortex/propagation.hpp"

namespace vortex {

struct RingMeasurement {
  double radius = 0.0;      // m
  double uncertainty = 0.0; // m
  bool is_ring = false;     // false for monotone (Gaussian-like) profiles
};

struct FringeCount {
  int count = 0;
  int sign = 0; // +1 / -1 from the lobe-chain diagonal, 0 when count == 0
};

struct HyperbolaFit {
  double w0 = 0.0;       // m
  double z0 = 0.0;       // m
  double zr = 0.0;       // m
  double m2 = 0.0;       // (pi w0^2 / lambda) / zr
  double m2_sigma = 0.0; // delta-method propagation of the fit covariance
  std::array<std::array<double, 3>, 3> covariance{}; // over (w0, z0, zr), SI
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct HyperbolaFitPair {
  HyperbolaFit horizontal;
  HyperbolaFit vertical;
};

struct ModalSpectrum {
  int ell = 0;
  double basis_waist = 0.0;                   // m
  std::vector<std::complex<double>> coeffs;   // c_p, p = 0..p_max
  double captured_power = 0.0;                // sum |c_p|^2, W
  double field_power = 0.0;                   // W
  double purity = 0.0;                        // |c_0|^2 / sum |c_p|^2
};

namespace analysis {

// Azimuthal-average peak radius about the intensity centroid, refined by a
// 3-point parabola. Monotone profiles come back with radius 0 and
// is_ring = false. The centroid must lie within n/8 of the grid center.
RingMeasurement measure_ring_radius(const ComplexFieldGrid& field);

// Dark-fringe count of a tilted-lens pattern. The profile is taken through
// the centroid along the lobe-chain diagonal (at 45 degrees to the
// astigmatism axes given by lens_axes_angle); local minima count when they
// dip at least `prominence` below the lower neighboring maximum. Throws
// LowContrastError when minima exist but none pass the threshold.
FringeCount count_dark_fringes(const ComplexFieldGrid& field, double lens_axes_angle,
                               double prominence = 0.2);

// Nonlinear fit of radius(z) = s w0 sqrt(1 + ((z-z0)/zr)^2) with
// s = sqrt(|ell|/2) (s = 1 for ell = 0), per axis; M^2 = (pi w0^2/lambda)/zr.
// Requires >= 5 points.
HyperbolaFitPair fit_hyperbola(const WidthScan& scan, double lambda, int ell,
                               int max_iterations = 200);
HyperbolaFit fit_hyperbola_axis(const std::vector<std::pair<double, double>>& z_radius,
                                double lambda, int ell, int max_iterations = 200);

// Linear fit of R(ell) = r0 (1 + beta |ell|); params = (r0, beta).
// Requires >= 3 distinct |ell|.
FitResult fit_radius_model(const std::vector<std::pair<int, double>>& data);

// Nonlinear fit of the propagated product-ring model over (w1, r0) with
// beta fixed; data are (ell, radius at zb). Params = (w1, r0).
FitResult fit_blue_radius_model(const std::vector<std::pair<int, double>>& data, double zb,
                                double beta_fixed, double lambda_b,
                                double w1_init = 1e-4, double r0_init = 5e-5);

// Projection onto LG_{p,ell} modes of waist basis_waist at the field plane
// (flat phase). basis_waist <= 0 selects the waist maximizing |c_0|^2 by
// golden-section search. p_max >= 5.
ModalSpectrum lg_decompose(const ComplexFieldGrid& field, int ell, double basis_waist,
                           int p_max);

// Net phase circulation (in units of 2 pi) around an origin-centered loop.
int phase_winding(const ComplexFieldGrid& field, double radius);

} // namespace analysis
} // namespace vortex
