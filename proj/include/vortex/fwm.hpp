#pragma once

#include <vector>

#include "vortex/beams.hpp"
#include "vortex/grid.hpp"

namespace vortex {

// Weak-gain conversion settings. chi3 and amplification_length enter only as
// the product chi3 * Z; absolute output power is uncalibrated, so the
// defaults make that product 1.
struct FwmConfig {
  double chi3 = 10.0;                  // coupling scale, arbitrary units
  double amplification_length = 0.10;  // Z, m
  double detuning = 1.5e9;             // Hz, bookkeeping only
  double cell_length = 0.10;           // m
  double lambda_ir = 5.23e-6;          // m

  void validate() const; // Z > 0 and Z <= cell_length
};

// One {ell_b, ell_ir, w_b, w_ir} Gouy-matching candidate. Azimuthal
// conservation ell_b + ell_ir = ell_total is enforced at construction.
struct PhaseMatchCandidate {
  int ell_b = 0;
  int ell_ir = 0;
  double w_b = 0.0;          // m
  double w_ir = 0.0;         // m
  double gouy_residual = 0.0; // |LHS - RHS| of the matching relation, 1/m
  bool boyd_exact = false;   // |ell_b| + |ell_ir| == |ell_total|

  static PhaseMatchCandidate make(int ell_total, int ell_b, double w_b, double w_ir,
                                  double residual);
};

struct EfficiencyPoint {
  int ell = 0;
  double k_ell = 0.0; // overlap integral, W^2/m^2
  double eta = 0.0;   // normalized efficiency
};

struct FourWavelengths {
  double lambda1 = 780e-9;
  double lambda2 = 776e-9;
  double lambda_b = 0.0;     // 0 = derive from the other three
  double lambda_ir = 5.23e-6;
};

struct GouySearch {
  int ell_b_min = 0;
  int ell_b_max = 0;
  double w_center = 0.0;          // log-grid center for w_b and w_ir, m
  double decades = 3.0;           // total span of each grid
  int points_per_decade = 200;
  bool equal_rayleigh = false;    // pin all waists to a common Rayleigh range
  // keep residual <= cutoff * RHS; 0 = auto (the log-grid snap resolution in
  // the free search, 1e-9 in the equal-Rayleigh mode)
  double rel_cutoff = 0.0;
  int max_per_pair = 0;           // candidates kept per pair, 0 = no limit
};

namespace fwm {

// 1/lambda_b = 1/lambda1 + 1/lambda2 - 1/lambda_ir.
double blue_wavelength(double lambda1, double lambda2, double lambda_ir);

// E_b = chi3 * Z * E1 * E2 pointwise, tagged with the matched blue
// wavelength. Inputs must share n, pitch and plane z.
ComplexFieldGrid product_field(const ComplexFieldGrid& e1, const ComplexFieldGrid& e2,
                               const FwmConfig& cfg);

// w12 = w1 w2 / sqrt(w1^2 + w2^2): waist of the product of two coaxial
// Gaussian envelopes.
double combined_waist(double w1, double w2);

// Ring radius of the product field: R12 = R / sqrt(1 + 2 R^2/(|ell| w1^2)),
// identical to combined_waist(w1, w2) * sqrt(|ell|/2).
double blue_ring_radius(double ring_radius, int ell, double w1);

// Ring radius after free propagation over zb: R12 * sqrt(1 + zb^2/zRb^2)
// with zRb = pi w12^2 / lambda_b.
double observed_blue_radius(double r12, double w12, double zb, double lambda_b);

// Closed form of the radial overlap integral of a Gaussian against a
// one-ring LG intensity: (2 P1 P2 / (pi w1^2)) / (1 + w2^2/w1^2)^(|ell|+1).
double overlap_Kl(double p1, double p2, double w1, double w2, int ell);

// Adaptive quadrature of the defining integral int I1 I2 2 pi r dr; the
// independent oracle for overlap_Kl. Both beams evaluated at plane z.
double overlap_Kl_numeric(const BeamSpec& b1, const BeamSpec& b2, double z = 0.0,
                          double rel_tol = 1e-11);

// K_ell over a sweep with w2(ell) = r0 (1 + beta |ell|) / sqrt(|ell|/2),
// a = r0/w1, normalized so eta(|ell| = norm_ell) = 1.
std::vector<EfficiencyPoint> efficiency_curve(const std::vector<int>& ells, double a,
                                              double beta, double w1, double p1 = 0.1,
                                              double p2 = 0.1, int norm_ell = 5);

// Enumerate (ell_b, ell_ir = ell - ell_b) pairs and waist pairs compatible
// with Gouy-phase conservation
//   lb(|ell_b|+1)/w_b^2 + lir(|ell_ir|+1)/w_ir^2 = l1/w1^2 + l2(|ell|+1)/w2^2,
// discretized on log grids. Empty result when nothing fits the bounds.
std::vector<PhaseMatchCandidate> gouy_candidates(double w1, double w2, int ell,
                                                 const FourWavelengths& wl,
                                                 const GouySearch& search);

} // namespace fwm
} // namespace vortex
