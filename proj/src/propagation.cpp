#include "vortex/propagation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "vortex/units.hpp"

namespace vortex {
namespace prop {

namespace {

// fftw planning is not thread-safe; execution of distinct plans is.
std::mutex g_plan_mutex;

void fft2(std::vector<std::complex<double>>& data, int n, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    plan = fftw_plan_dft_2d(n, n, ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
  }
}

// Frequency of FFT bin i on an n-point grid with the given pitch (1/m).
inline double fft_freq(int i, int n, double pitch) {
  return (i <= n / 2 ? i : i - n) / (n * pitch);
}

// Super-Gaussian absorber over the outer n/16 border, identity elsewhere.
void apply_edge_mask(ComplexFieldGrid& field) {
  const int n = field.n;
  const int margin = n / 16;
  std::vector<double> mask1d(std::size_t(n), 1.0);
  for (int i = 0; i < n; ++i) {
    const int d = std::min(i, n - 1 - i);
    if (d < margin) {
      const double t = double(margin - d) / (margin / 3.0);
      mask1d[i] = std::exp(-std::pow(t, 6));
    }
  }
  for (int iy = 0; iy < n; ++iy) {
    if (mask1d[iy] == 1.0) {
      for (int ix = 0; ix < margin; ++ix) field.at(ix, iy) *= mask1d[ix];
      for (int ix = n - margin; ix < n; ++ix) field.at(ix, iy) *= mask1d[ix];
    } else {
      for (int ix = 0; ix < n; ++ix) field.at(ix, iy) *= mask1d[ix] * mask1d[iy];
    }
  }
}

struct BeamStats {
  double power = 0.0;
  double cx = 0.0, cy = 0.0;
  double sigma_r = 0.0;  // rms radius about the centroid
  double measure = 0.0;  // max(ring radius, effective width)
};

BeamStats spatial_stats(const ComplexFieldGrid& field) {
  BeamStats st;
  double sum = 0.0, sx = 0.0, sy = 0.0, sr2 = 0.0;
  const int n = field.n;
  for (int iy = 0; iy < n; ++iy) {
    const double yv = field.y(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double w = std::norm(field.at(ix, iy));
      sum += w;
      sx += w * field.x(ix);
      sy += w * yv;
    }
  }
  if (sum <= 0.0) return st;
  st.power = sum * field.pitch * field.pitch;
  st.cx = sx / sum;
  st.cy = sy / sum;
  for (int iy = 0; iy < n; ++iy) {
    const double dy = field.y(iy) - st.cy;
    for (int ix = 0; ix < n; ++ix) {
      const double dx = field.x(ix) - st.cx;
      sr2 += std::norm(field.at(ix, iy)) * (dx * dx + dy * dy);
    }
  }
  const double r2 = sr2 / sum;
  st.sigma_r = std::sqrt(r2);

  const auto profile = radial_intensity_profile(field, st.cx, st.cy);
  const auto [peak_pos, peak_resid] = parabolic_peak(profile);
  (void)peak_resid;
  const double ring = peak_pos >= 1.0 ? peak_pos * field.pitch : 0.0;
  // for a one-ring mode <r^2> = R^2 + w^2/2, so this recovers w(z)
  const double w_eff = std::sqrt(2.0 * std::max(r2 - ring * ring, 0.05 * r2));
  st.measure = std::max(ring, w_eff);
  return st;
}

} // namespace

AnalyticPropagation propagate_analytic(const BeamSpec& spec, double z) {
  spec.validate();
  const double zr = beams::rayleigh_range(spec.waist, spec.wavelength);
  const double zeta = z - spec.z0;
  AnalyticPropagation out;
  out.w = spec.waist * std::sqrt(1.0 + (zeta / zr) * (zeta / zr));
  out.curvature_radius =
      zeta == 0.0 ? std::numeric_limits<double>::infinity() : zeta * (1.0 + (zr / zeta) * (zr / zeta));
  out.gouy = (std::abs(spec.ell) + 1) * std::atan(zeta / zr);
  out.ring_radius = spec.ell == 0 ? 0.0 : out.w * std::sqrt(std::abs(spec.ell) / 2.0);
  return out;
}

struct FieldPropagator::Impl {
  int n = 0;
  double pitch = 0.0;
  double wavelength = 0.0;
  double z_src = 0.0;
  double guard = 3.0;
  double power_in = 0.0;
  double sigma_r = 0.0;
  double measure = 0.0;
  double theta_spread = 0.0; // lambda * rms spatial-frequency radius
  double mixed_moment = 0.0; // <(r - r0) . (theta - theta0)>, m rad
  double walk_rate = 0.0;    // |lambda * mean spatial frequency|, rad
  std::vector<std::complex<double>> spectrum;

  // Second moments propagate exactly quadratically in the paraxial regime:
  // sigma^2(z) = sigma0^2 + 2 M dz + theta^2 dz^2, M < 0 for converging beams.
  double sigma_at(double dz) const {
    const double s2 = sigma_r * sigma_r + 2.0 * mixed_moment * dz +
                      theta_spread * theta_spread * dz * dz;
    return std::sqrt(std::max(s2, 0.0));
  }
};

FieldPropagator::FieldPropagator(const ComplexFieldGrid& source, double guard_factor)
    : impl_(std::make_unique<Impl>()) {
  impl_->n = source.n;
  impl_->pitch = source.pitch;
  impl_->wavelength = source.wavelength;
  impl_->z_src = source.z;
  impl_->guard = guard_factor;

  const auto st = spatial_stats(source);
  impl_->power_in = st.power;
  impl_->sigma_r = st.sigma_r;
  impl_->measure = st.measure;

  impl_->spectrum = source.data;
  fft2(impl_->spectrum, impl_->n, FFTW_FORWARD);

  // rms width of the angular spectrum about its centroid
  double sum = 0.0, sfx = 0.0, sfy = 0.0, sf2 = 0.0;
  const int n = impl_->n;
  for (int iy = 0; iy < n; ++iy) {
    const double fy = fft_freq(iy, n, impl_->pitch);
    for (int ix = 0; ix < n; ++ix) {
      const double fx = fft_freq(ix, n, impl_->pitch);
      const double w = std::norm(impl_->spectrum[std::size_t(iy) * n + ix]);
      sum += w;
      sfx += w * fx;
      sfy += w * fy;
      sf2 += w * (fx * fx + fy * fy);
    }
  }
  if (sum > 0.0) {
    const double mfx = sfx / sum, mfy = sfy / sum;
    const double var = std::max(sf2 / sum - mfx * mfx - mfy * mfy, 0.0);
    impl_->theta_spread = impl_->wavelength * std::sqrt(var);
    impl_->walk_rate = impl_->wavelength * std::hypot(mfx, mfy);

    // mixed moment <(r - r0).(theta - theta0)> from the spectral gradients:
    // dE/dx = ifft(i 2 pi fx A), transverse current J = (lambda/2pi) Im(E* dE)
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<std::complex<double>> grad(impl_->spectrum.size());
      for (int iy = 0; iy < n; ++iy) {
        const double fy = fft_freq(iy, n, impl_->pitch);
        for (int ix = 0; ix < n; ++ix) {
          const double fx = fft_freq(ix, n, impl_->pitch);
          const double f = axis == 0 ? fx : fy;
          grad[std::size_t(iy) * n + ix] =
              impl_->spectrum[std::size_t(iy) * n + ix] *
              std::complex<double>(0.0, 2.0 * pi * f);
        }
      }
      fft2(grad, n, FFTW_BACKWARD);
      const double norm = 1.0 / (double(n) * double(n));
      double acc = 0.0, isum = 0.0;
      const double mean_theta = impl_->wavelength * (axis == 0 ? mfx : mfy);
      const double c0 = axis == 0 ? st.cx : st.cy;
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          const std::size_t idx = std::size_t(iy) * n + ix;
          const std::complex<double> e = source.data[idx];
          const std::complex<double> de = grad[idx] * norm;
          const double u = (axis == 0 ? source.x(ix) : source.y(iy)) - c0;
          const double current = impl_->wavelength / (2.0 * pi) *
                                 std::imag(std::conj(e) * de);
          acc += u * (current - mean_theta * std::norm(e));
          isum += std::norm(e);
        }
      }
      if (isum > 0.0) impl_->mixed_moment += acc / isum;
    }
  }
}

FieldPropagator::~FieldPropagator() = default;

ComplexFieldGrid FieldPropagator::to(double z) const {
  const Impl& im = *impl_;
  const double dz = z - im.z_src;

  if (im.power_in > 0.0 && im.sigma_r > 0.0) {
    const double scale = std::max(im.sigma_at(dz) / im.sigma_r, 0.05);
    const double walk = im.walk_rate * std::abs(dz);
    const double needed = im.guard * im.measure * scale + walk;
    const double half_extent = 0.5 * im.n * im.pitch;
    if (half_extent < needed)
      throw ApertureOverflowError(
          "beam radius bound " + std::to_string(needed) + " m exceeds the half extent " +
          std::to_string(half_extent) + " m; enlarge the grid or shorten the step");
  }

  const int n = im.n;
  const double k = 2.0 * pi / im.wavelength;
  ComplexFieldGrid out(n, im.pitch, im.wavelength, z);
  out.data = im.spectrum;

  for (int iy = 0; iy < n; ++iy) {
    const double ky = 2.0 * pi * fft_freq(iy, n, im.pitch);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = 2.0 * pi * fft_freq(ix, n, im.pitch);
      const double arg = k * k - kx * kx - ky * ky;
      auto& v = out.data[std::size_t(iy) * n + ix];
      if (arg > 0.0)
        v *= std::polar(1.0, std::sqrt(arg) * dz);
      else
        v = 0.0; // evanescent components do not propagate
    }
  }

  fft2(out.data, n, FFTW_BACKWARD);
  const double norm = 1.0 / (double(n) * double(n));
  for (auto& v : out.data) v *= norm;
  apply_edge_mask(out);

  if (im.power_in > 0.0) {
    const double power_out = out.power();
    if (std::abs(power_out - im.power_in) > 1e-5 * im.power_in)
      throw NumericError("propagation lost power (" + std::to_string(power_out) + " of " +
                         std::to_string(im.power_in) + " W): field is clipping the aperture");
  }
  return out;
}

ComplexFieldGrid propagate_grid(const ComplexFieldGrid& field, double dz, double guard_factor) {
  if (dz == 0.0) return field;
  return FieldPropagator(field, guard_factor).to(field.z + dz);
}

ComplexFieldGrid apply_tilted_lens(const ComplexFieldGrid& field, double f, double tilt) {
  if (!(f > 0.0)) throw ValidationError("lens focal length must be > 0");
  if (!(tilt >= 0.0 && tilt < pi / 2))
    throw ValidationError("lens tilt must lie in [0, pi/2)");
  const double fx = f * std::cos(tilt);
  const double fy = f / std::cos(tilt);
  const double k = 2.0 * pi / field.wavelength;

  ComplexFieldGrid out = field;
  for (int iy = 0; iy < out.n; ++iy) {
    const double yv = out.y(iy);
    const double phase_y = -0.5 * k * yv * yv / fy;
    for (int ix = 0; ix < out.n; ++ix) {
      const double xv = out.x(ix);
      out.at(ix, iy) *= std::polar(1.0, phase_y - 0.5 * k * xv * xv / fx);
    }
  }
  return out;
}

namespace {

// Ring radius along one axis direction (+/- unit vector), bilinear samples
// from the centroid outward, 3-point parabola at the peak.
double axis_peak_radius(const ComplexFieldGrid& field, double cx, double cy, double ux,
                        double uy) {
  const double step = field.pitch;
  const int jmax = int(0.5 * field.extent() / step) - 2;
  std::vector<double> profile;
  profile.reserve(jmax);
  for (int j = 0; j < jmax; ++j) {
    const double d = j * step;
    profile.push_back(std::norm(field.sample_bilinear(cx + ux * d, cy + uy * d)));
  }
  return parabolic_peak(profile).first * step;
}

std::pair<double, double> d4sigma_radii(const ComplexFieldGrid& field) {
  double sum = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int iy = 0; iy < field.n; ++iy) {
    const double yv = field.y(iy);
    for (int ix = 0; ix < field.n; ++ix) {
      const double w = std::norm(field.at(ix, iy));
      const double xv = field.x(ix);
      sum += w;
      sx += w * xv;
      sy += w * yv;
      sxx += w * xv * xv;
      syy += w * yv * yv;
    }
  }
  if (sum <= 0.0) return {0.0, 0.0};
  const double mx = sx / sum, my = sy / sum;
  const double vx = std::max(sxx / sum - mx * mx, 0.0);
  const double vy = std::max(syy / sum - my * my, 0.0);
  return {2.0 * std::sqrt(vx), 2.0 * std::sqrt(vy)};
}

} // namespace

WidthSample measure_widths(const ComplexFieldGrid& field, WidthMethod method) {
  WidthSample s;
  s.z = field.z;
  if (method == WidthMethod::d4sigma) {
    auto [rx, ry] = d4sigma_radii(field);
    s.radius_horizontal = rx;
    s.radius_vertical = ry;
    return s;
  }
  const auto [cx, cy] = field.centroid();
  s.radius_horizontal = 0.5 * (axis_peak_radius(field, cx, cy, 1.0, 0.0) +
                               axis_peak_radius(field, cx, cy, -1.0, 0.0));
  s.radius_vertical = 0.5 * (axis_peak_radius(field, cx, cy, 0.0, 1.0) +
                             axis_peak_radius(field, cx, cy, 0.0, -1.0));
  return s;
}

WidthScan width_scan(const ComplexFieldGrid& field, const std::vector<double>& z_list,
                     WidthMethod method) {
  FieldPropagator propagator(field);
  WidthScan scan;
  scan.reserve(z_list.size());
  for (double z : z_list) {
    const ComplexFieldGrid plane = z == field.z ? field : propagator.to(z);
    scan.push_back(measure_widths(plane, method));
  }
  return scan;
}

double find_min_width_product_plane(const ComplexFieldGrid& field, double z_lo, double z_hi) {
  FieldPropagator propagator(field);
  auto objective = [&](double z) {
    const auto s = measure_widths(propagator.to(z), WidthMethod::d4sigma);
    return s.radius_horizontal * s.radius_vertical;
  };

  constexpr int coarse = 9;
  double best_z = z_lo, best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < coarse; ++i) {
    const double z = z_lo + (z_hi - z_lo) * i / (coarse - 1);
    const double v = objective(z);
    if (v < best_v) {
      best_v = v;
      best_z = z;
    }
  }
  const double span = (z_hi - z_lo) / (coarse - 1);
  double a = std::max(z_lo, best_z - span);
  double b = std::min(z_hi, best_z + span);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  const double tol = 1e-3 * (z_hi - z_lo);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    }
  }
  return 0.5 * (a + b);
}

} // namespace prop
} // namespace vortex
