#pragma once

#include <complex>

#include "vortex/errors.hpp"
#include "vortex/grid.hpp"

namespace vortex {

// One paraxial beam. Only one-ring (p = 0) Laguerre-Gaussian modes are
// supported; ell = 0 is the plain Gaussian.
struct BeamSpec {
  double wavelength = 0.0; // m
  double waist = 0.0;      // w0, m
  int ell = 0;             // azimuthal index, signed
  int p = 0;               // radial index, must stay 0
  double power = 1.0;      // W
  double z0 = 0.0;         // waist position, m

  void validate() const; // throws InvalidBeamError / UnsupportedModeError
};

// Empirical ring-radius model R(ell) = r0 * (1 + beta*|ell|).
struct RadiusModel {
  double r0 = 0.0;  // m
  double beta = 0.0;

  void validate() const;
};

// Inputs of the two-photon excitation budget. All rates in Hz.
struct RabiBudget {
  double omega1_peak = 0.0; // on-axis Rabi frequency of the Gaussian drive
  double omega2 = 0.0;      // vortex-beam Rabi frequency at its ring
  double delta = 0.0;       // one-photon detuning
  double radius = 0.0;      // evaluation radius (m), typically the ring radius
  double w1 = 0.0;          // Gaussian waist (m)
};

struct TwoPhotonRabi {
  double omega_eff = 0.0;    // omega1(r) * omega2 / (2 delta)
  double omega1_at_r = 0.0;  // Gaussian drive Rabi frequency at the evaluation radius
  double adiabaticity = 0.0; // omega1(r)^2 / delta^2, must stay << 1
};

namespace beams {

// Normalized one-ring LG amplitude at radius r, angle theta, plane z.
// |u|^2 integrates over the transverse plane to spec.power. Phase is
// k*z' + ell*theta + k*r^2/(2*R(z')) - (|ell|+1)*atan(z'/zR), z' = z - z0.
std::complex<double> lg_field_amplitude(const BeamSpec& spec, double r, double theta, double z);

// Radial intensity (W/m^2) of the mode at plane z, evaluated in log domain
// so that |ell|! and the ring power law never overflow.
double intensity_radial(const BeamSpec& spec, double r, double z);

// Peak-intensity radius R = w0 * sqrt(|ell|/2) of a vortex at its waist.
double ring_radius(const BeamSpec& spec);
double ring_radius(double w0, int ell);

// Inverse of ring_radius: w = R / sqrt(|ell|/2).
double waist_from_ring(double radius, int ell);

// zR = pi w0^2 / lambda. For a ring-parameterized vortex this equals
// 2 pi R^2 / (lambda |ell|).
double rayleigh_range(const BeamSpec& spec);
double rayleigh_range(double w0, double lambda);

// R(ell) = r0 (1 + beta |ell|); even in ell by construction.
double radius_model(int ell, const RadiusModel& m);

// Gaussian-beam field-amplitude scaling: omega_peak * exp(-r^2/w^2).
double rabi_at_radius(double omega_peak, double r, double w);

// Effective two-photon Rabi frequency omega1(r) omega2 / (2 delta) plus the
// adiabaticity ratio.
TwoPhotonRabi effective_two_photon_rabi(const RabiBudget& budget);

// Sample the mode on a grid. Requires extent >= 6 * max(w(z), R(z)) and
// pitch <= min(w(z)/8, R(z)/(4|ell|)), which keeps the azimuthal winding at
// the ring sampled with >= 8 points per 2 pi.
ComplexFieldGrid rasterize(const BeamSpec& spec, const GridParams& grid);

} // namespace beams
} // namespace vortex
