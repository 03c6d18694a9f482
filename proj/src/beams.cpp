#include "vortex/beams.hpp"

#include <cmath>

#include "vortex/units.hpp"

namespace vortex {

void BeamSpec::validate() const {
  if (!(wavelength > 0.0)) throw InvalidBeamError("wavelength must be > 0");
  if (!(waist > 0.0)) throw InvalidBeamError("waist must be > 0");
  if (!(power >= 0.0)) throw InvalidBeamError("power must be >= 0");
  if (p != 0)
    throw UnsupportedModeError("only one-ring (p = 0) modes are supported, got p = " +
                               std::to_string(p));
}

void RadiusModel::validate() const {
  if (!(r0 > 0.0)) throw InvalidBeamError("radius model r0 must be > 0");
  if (!(beta >= 0.0)) throw InvalidBeamError("radius model beta must be >= 0");
}

namespace beams {

namespace {

// Single-plane evaluator with the z-dependent factors hoisted out of the
// per-point loop.
struct LgPlane {
  int ell;
  int l;         // |ell|
  double w;      // w(z)
  double inv_r;  // 1/R(z) = zeta / (zeta^2 + zR^2), finite everywhere
  double half_k; // k/2
  double axial_phase; // k zeta - (|ell|+1) atan(zeta/zR)
  double log_norm;    // log sqrt(2P/(pi w^2 |l|!)) + |l|/2 log 2

  LgPlane(const BeamSpec& spec, double z) {
    spec.validate();
    ell = spec.ell;
    l = std::abs(spec.ell);
    const double zr = rayleigh_range(spec.waist, spec.wavelength);
    const double zeta = z - spec.z0;
    const double k = 2.0 * pi / spec.wavelength;
    w = spec.waist * std::sqrt(1.0 + (zeta / zr) * (zeta / zr));
    inv_r = zeta / (zeta * zeta + zr * zr);
    half_k = 0.5 * k;
    axial_phase = k * zeta - (l + 1) * std::atan(zeta / zr);
    log_norm = 0.5 * (std::log(2.0 * spec.power / (pi * w * w)) -
                      std::lgamma(double(l) + 1.0) + l * std::log(2.0));
  }

  std::complex<double> operator()(double r, double theta) const {
    const double rho = r / w;
    double envelope;
    if (l == 0) {
      envelope = std::exp(log_norm - rho * rho);
    } else {
      if (r == 0.0 || !(rho < 1e7)) return {0.0, 0.0}; // singularity / deep tail
      envelope = std::exp(log_norm + l * std::log(rho) - rho * rho);
    }
    const double phase = axial_phase + ell * theta + half_k * r * r * inv_r;
    return std::polar(envelope, phase);
  }
};

} // namespace

std::complex<double> lg_field_amplitude(const BeamSpec& spec, double r, double theta,
                                        double z) {
  return LgPlane(spec, z)(r, theta);
}

double intensity_radial(const BeamSpec& spec, double r, double z) {
  spec.validate();
  const int l = std::abs(spec.ell);
  const double zr = rayleigh_range(spec.waist, spec.wavelength);
  const double zeta = z - spec.z0;
  const double w = spec.waist * std::sqrt(1.0 + (zeta / zr) * (zeta / zr));
  const double t = 2.0 * r * r / (w * w);
  const double peak = 2.0 * spec.power / (pi * w * w);
  if (l == 0) return peak * std::exp(-t);
  if (r == 0.0 || !(t < 1e15)) return 0.0; // core, or exp underflow territory
  // log-domain form of peak * t^l e^-t / l!, safe for any l
  return peak * std::exp(l * std::log(t) - t - std::lgamma(double(l) + 1.0));
}

double ring_radius(double w0, int ell) {
  if (ell == 0) throw NoRingError("ell = 0 mode has no ring");
  return w0 * std::sqrt(std::abs(ell) / 2.0);
}

double ring_radius(const BeamSpec& spec) {
  spec.validate();
  return ring_radius(spec.waist, spec.ell);
}

double waist_from_ring(double radius, int ell) {
  if (ell == 0) throw NoRingError("ell = 0 mode has no ring");
  if (!(radius > 0.0)) throw InvalidBeamError("ring radius must be > 0");
  return radius / std::sqrt(std::abs(ell) / 2.0);
}

double rayleigh_range(double w0, double lambda) { return pi * w0 * w0 / lambda; }

double rayleigh_range(const BeamSpec& spec) {
  spec.validate();
  return rayleigh_range(spec.waist, spec.wavelength);
}

double radius_model(int ell, const RadiusModel& m) {
  m.validate();
  if (ell == 0) throw NoRingError("radius model is defined for ell != 0 only");
  return m.r0 * (1.0 + m.beta * std::abs(ell));
}

double rabi_at_radius(double omega_peak, double r, double w) {
  if (!(w > 0.0)) throw InvalidBeamError("waist must be > 0");
  return omega_peak * std::exp(-r * r / (w * w));
}

TwoPhotonRabi effective_two_photon_rabi(const RabiBudget& budget) {
  if (budget.delta == 0.0) throw ResonanceError("two-photon budget requires delta != 0");
  TwoPhotonRabi out;
  out.omega1_at_r = rabi_at_radius(budget.omega1_peak, budget.radius, budget.w1);
  out.omega_eff = out.omega1_at_r * budget.omega2 / (2.0 * budget.delta);
  out.adiabaticity = (out.omega1_at_r / budget.delta) * (out.omega1_at_r / budget.delta);
  return out;
}

ComplexFieldGrid rasterize(const BeamSpec& spec, const GridParams& grid) {
  spec.validate();
  const LgPlane plane(spec, grid.z);
  const double ring = plane.l > 0 ? ring_radius(plane.w, spec.ell) : 0.0;

  const double max_feature = std::max(plane.w, ring);
  const double extent = grid.n * grid.pitch;
  if (extent < 6.0 * max_feature)
    throw UndersampledGridError("grid extent " + std::to_string(extent) +
                                " m is below 6x the beam size " +
                                std::to_string(max_feature) + " m");
  double pitch_limit = plane.w / 8.0;
  if (plane.l > 0) pitch_limit = std::min(pitch_limit, ring / (4.0 * plane.l));
  if (grid.pitch > pitch_limit)
    throw UndersampledGridError("grid pitch " + std::to_string(grid.pitch) +
                                " m exceeds the sampling limit " +
                                std::to_string(pitch_limit) + " m");

  ComplexFieldGrid field(grid.n, grid.pitch, spec.wavelength, grid.z);
  for (int iy = 0; iy < grid.n; ++iy) {
    const double yv = field.y(iy);
    for (int ix = 0; ix < grid.n; ++ix) {
      const double xv = field.x(ix);
      field.at(ix, iy) = plane(std::hypot(xv, yv), std::atan2(yv, xv));
    }
  }

  if (spec.power > 0.0) {
    const double discrete = field.power();
    if (std::abs(discrete - spec.power) > 1e-4 * spec.power)
      throw NumericError("rasterized power " + std::to_string(discrete) +
                         " W deviates from requested " + std::to_string(spec.power) + " W");
  }
  return field;
}

} // namespace beams
} // namespace vortex
