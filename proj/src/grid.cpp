#include "vortex/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace vortex {

ComplexFieldGrid::ComplexFieldGrid(int n_, double pitch_, double wavelength_, double z_)
    : n(n_), pitch(pitch_), wavelength(wavelength_), z(z_) {
  if (n < 256 || !std::has_single_bit(unsigned(n)))
    throw UndersampledGridError("grid side must be a power of two >= 256, got " +
                                std::to_string(n));
  if (!(pitch > 0.0)) throw UndersampledGridError("grid pitch must be > 0");
  if (!(wavelength > 0.0)) throw InvalidBeamError("wavelength must be > 0");
  data.assign(std::size_t(n) * n, {0.0, 0.0});
}

double ComplexFieldGrid::power() const {
  double sum = 0.0;
  for (const auto& v : data) sum += std::norm(v);
  return sum * pitch * pitch;
}

std::pair<double, double> ComplexFieldGrid::centroid() const {
  double sum = 0.0, sx = 0.0, sy = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double yv = y(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double w = std::norm(at(ix, iy));
      sum += w;
      sx += w * x(ix);
      sy += w * yv;
    }
  }
  if (sum <= 0.0) return {0.0, 0.0};
  return {sx / sum, sy / sum};
}

std::complex<double> ComplexFieldGrid::sample_bilinear(double px, double py) const {
  const double fx = px / pitch + n / 2;
  const double fy = py / pitch + n / 2;
  const int ix = int(std::floor(fx));
  const int iy = int(std::floor(fy));
  if (ix < 0 || iy < 0 || ix + 1 >= n || iy + 1 >= n) return {0.0, 0.0};
  const double tx = fx - ix;
  const double ty = fy - iy;
  return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
         (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
}

std::vector<double> radial_intensity_profile(const ComplexFieldGrid& field, double cx,
                                             double cy) {
  const int n = field.n;
  std::vector<double> sum(std::size_t(n), 0.0);
  std::vector<std::uint32_t> count(std::size_t(n), 0);
  for (int iy = 0; iy < n; ++iy) {
    const double dy = field.y(iy) - cy;
    for (int ix = 0; ix < n; ++ix) {
      const double dx = field.x(ix) - cx;
      const double r = std::hypot(dx, dy);
      const auto bin = std::size_t(r / field.pitch);
      if (bin < sum.size()) {
        sum[bin] += std::norm(field.at(ix, iy));
        ++count[bin];
      }
    }
  }
  for (std::size_t k = 0; k < sum.size(); ++k)
    if (count[k] > 0) sum[k] /= count[k];
  return sum;
}

std::pair<double, double> parabolic_peak(const std::vector<double>& profile) {
  if (profile.empty()) return {0.0, 0.0};
  std::size_t k = 0;
  for (std::size_t i = 1; i < profile.size(); ++i)
    if (profile[i] > profile[k]) k = i;
  if (k == 0 || k + 1 >= profile.size()) return {double(k), 0.0};
  const double a = profile[k - 1], b = profile[k], c = profile[k + 1];
  const double denom = a - 2 * b + c;
  if (denom >= 0.0) return {double(k), 0.0}; // flat or concave-up: no refinement
  const double shift = 0.5 * (a - c) / denom;
  // residual of the parabola against the three samples is zero by
  // construction; report the shift magnitude as the interpolation term
  return {double(k) + shift, std::abs(shift)};
}

namespace {

constexpr char kMagic[4] = {'O', 'F', 'G', 'D'};

template <typename T>
void put(std::ofstream& out, T v) {
  static_assert(std::endian::native == std::endian::little);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

} // namespace

void write_ofgd(const ComplexFieldGrid& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put(out, std::uint32_t(field.n));
  put(out, field.pitch);
  put(out, field.wavelength);
  put(out, field.z);
  static_assert(sizeof(std::complex<double>) == 16);
  out.write(reinterpret_cast<const char*>(field.data.data()),
            std::streamsize(field.data.size() * 16));
  if (!out) throw Error("short write to " + path.string());
}

ComplexFieldGrid read_ofgd(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(path.string() + ": not an OFGD dump");
  const auto n = get<std::uint32_t>(in);
  const auto pitch = get<double>(in);
  const auto lambda = get<double>(in);
  const auto z = get<double>(in);
  ComplexFieldGrid field(int(n), pitch, lambda, z);
  in.read(reinterpret_cast<char*>(field.data.data()), std::streamsize(field.data.size() * 16));
  if (!in) throw Error(path.string() + ": truncated OFGD dump");
  return field;
}

} // namespace vortex
