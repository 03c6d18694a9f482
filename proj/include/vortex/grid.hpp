#pragma once

#include <complex>
#include <filesystem>
#include <utility>
#include <vector>

#include "vortex/errors.hpp"

namespace vortex {

struct GridParams {
  int n = 2048;       // samples per side, power of two >= 256
  double pitch = 0.0; // m
  double z = 0.0;     // plane position, m
};

// Sampled scalar field E(x, y) in units of sqrt(W)/m on a square grid.
// Row-major storage, index [iy*n + ix]; x = y = 0 sits on sample n/2 so the
// origin is always an exact sample.
struct ComplexFieldGrid {
  int n = 0;
  double pitch = 0.0;      // m
  double wavelength = 0.0; // m
  double z = 0.0;          // plane position, m
  std::vector<std::complex<double>> data;

  ComplexFieldGrid() = default;
  ComplexFieldGrid(int n_, double pitch_, double wavelength_, double z_ = 0.0);

  double x(int ix) const { return (ix - n / 2) * pitch; }
  double y(int iy) const { return (iy - n / 2) * pitch; }
  double extent() const { return n * pitch; }

  std::complex<double>& at(int ix, int iy) { return data[std::size_t(iy) * n + ix]; }
  const std::complex<double>& at(int ix, int iy) const { return data[std::size_t(iy) * n + ix]; }

  bool same_geometry(const ComplexFieldGrid& other) const {
    return n == other.n && pitch == other.pitch;
  }

  // Discrete power sum |E|^2 * pitch^2 (W).
  double power() const;

  // Intensity centroid in physical coordinates (m).
  std::pair<double, double> centroid() const;

  // Bilinear interpolation at physical coordinates; zero outside the grid.
  std::complex<double> sample_bilinear(double px, double py) const;
};

// Azimuthally averaged intensity about (cx, cy); bin k covers radii
// [k, k+1) * pitch. Empty bins hold 0.
std::vector<double> radial_intensity_profile(const ComplexFieldGrid& field, double cx, double cy);

// Peak of a sampled profile refined by a 3-point parabola. Returns
// (position in bin units, refinement residual). Monotone profiles peak at 0.
std::pair<double, double> parabolic_peak(const std::vector<double>& profile);

// Raw field dump, little-endian. 32-byte header: magic "OFGD", uint32 n,
// float64 pitch (m), float64 wavelength (m), float64 z (m); then n*n
// interleaved (re, im) float64 pairs, row-major.
void write_ofgd(const ComplexFieldGrid& field, const std::filesystem::path& path);
ComplexFieldGrid read_ofgd(const std::filesystem::path& path);

} // namespace vortex
