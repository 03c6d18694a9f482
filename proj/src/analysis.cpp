#include "vortex/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "vortex/fwm.hpp"
#include "vortex/units.hpp"

namespace vortex {
namespace analysis {

RingMeasurement measure_ring_radius(const ComplexFieldGrid& field) {
  const auto [cx, cy] = field.centroid();
  const double limit = field.extent() / 8.0;
  if (std::abs(cx) > limit || std::abs(cy) > limit)
    throw ValidationError("beam centroid sits too far off the grid center");

  const auto profile = radial_intensity_profile(field, cx, cy);
  const auto [pos, resid] = parabolic_peak(profile);

  RingMeasurement m;
  if (pos < 1.0) {
    // monotone (Gaussian-like) profile: peak on axis, no ring
    m.radius = 0.0;
    m.uncertainty = 0.5 * field.pitch;
    m.is_ring = false;
    return m;
  }
  m.radius = pos * field.pitch;
  const double half_pixel = 0.5 * field.pitch;
  m.uncertainty = std::hypot(half_pixel, resid * field.pitch);
  m.is_ring = true;
  return m;
}

namespace {

// Intensity-weighted variance of the position projected on direction angle.
double projected_variance(const ComplexFieldGrid& field, double cx, double cy, double angle) {
  const double ux = std::cos(angle), uy = std::sin(angle);
  double sum = 0.0, s1 = 0.0, s2 = 0.0;
  for (int iy = 0; iy < field.n; ++iy) {
    const double dy = field.y(iy) - cy;
    for (int ix = 0; ix < field.n; ++ix) {
      const double w = std::norm(field.at(ix, iy));
      const double u = (field.x(ix) - cx) * ux + dy * uy;
      sum += w;
      s1 += w * u;
      s2 += w * u * u;
    }
  }
  if (sum <= 0.0) return 0.0;
  const double mean = s1 / sum;
  return std::max(s2 / sum - mean * mean, 0.0);
}

} // namespace

FringeCount count_dark_fringes(const ComplexFieldGrid& field, double lens_axes_angle,
                               double prominence) {
  const auto [cx, cy] = field.centroid();

  // the lobe chain stretches along one diagonal of the astigmatism axes
  const double diag_plus = lens_axes_angle + pi / 4.0;
  const double diag_minus = lens_axes_angle - pi / 4.0;
  const double var_plus = projected_variance(field, cx, cy, diag_plus);
  const double var_minus = projected_variance(field, cx, cy, diag_minus);
  const bool chain_on_plus = var_plus >= var_minus;
  const double chain_angle = chain_on_plus ? diag_plus : diag_minus;

  // profile through the centroid along the chain
  const double half_len = 4.0 * std::sqrt(std::max(var_plus, var_minus));
  const double step = 0.5 * field.pitch;
  const int half_samples = std::max(32, int(half_len / step));
  const double ux = std::cos(chain_angle), uy = std::sin(chain_angle);
  std::vector<double> profile;
  profile.reserve(2 * half_samples + 1);
  for (int j = -half_samples; j <= half_samples; ++j) {
    const double d = j * step;
    profile.push_back(std::norm(field.sample_bilinear(cx + ux * d, cy + uy * d)));
  }
  const double peak = *std::max_element(profile.begin(), profile.end());
  if (peak <= 0.0) throw LowContrastError("empty fringe profile");
  for (auto& v : profile) v /= peak;

  // local extrema of the normalized profile; maxima below the floor are
  // diffraction ringing in the tails, not pattern lobes
  constexpr double kLobeFloor = 0.02;
  std::vector<std::size_t> maxima, minima;
  for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
    if (profile[i] > profile[i - 1] && profile[i] >= profile[i + 1] && profile[i] >= kLobeFloor)
      maxima.push_back(i);
    if (profile[i] < profile[i - 1] && profile[i] <= profile[i + 1]) minima.push_back(i);
  }

  int count = 0;
  bool saw_candidate = false;
  for (std::size_t m : minima) {
    // neighboring maxima on both sides
    double left = 0.0, right = 0.0;
    for (auto it = maxima.rbegin(); it != maxima.rend(); ++it)
      if (*it < m) {
        left = profile[*it];
        break;
      }
    for (std::size_t mx : maxima)
      if (mx > m) {
        right = profile[mx];
        break;
      }
    if (left <= 0.0 || right <= 0.0) continue; // profile tail, not a fringe
    saw_candidate = true;
    const double floor_level = std::min(left, right);
    if (floor_level - profile[m] >= prominence * floor_level) ++count;
  }

  if (count == 0 && saw_candidate)
    throw LowContrastError("fringe minima present but below the prominence threshold");

  FringeCount out;
  out.count = count;
  // chain on the (axes - 45 deg) diagonal for positive charge; fixed by the
  // grid simulation of a known-sign mode
  out.sign = count == 0 ? 0 : (chain_on_plus ? -1 : +1);
  return out;
}

HyperbolaFit fit_hyperbola_axis(const std::vector<std::pair<double, double>>& z_radius,
                                double lambda, int ell, int max_iterations) {
  if (z_radius.size() < 5)
    throw ValidationError("hyperbola fit needs >= 5 scan points, got " +
                          std::to_string(z_radius.size()));
  const double s = ell == 0 ? 1.0 : std::sqrt(std::abs(ell) / 2.0);

  // seed from the narrowest point and a far point
  auto narrow = std::min_element(z_radius.begin(), z_radius.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
  const double z0_init = narrow->first;
  const double w0_init = std::max(narrow->second / s, 1e-9);
  double zr_init = 0.0;
  {
    auto far = std::max_element(z_radius.begin(), z_radius.end(),
                                [&](const auto& a, const auto& b) {
                                  return std::abs(a.first - z0_init) < std::abs(b.first - z0_init);
                                });
    const double ratio = far->second / (s * w0_init);
    zr_init = ratio > 1.0 + 1e-9
                  ? std::abs(far->first - z0_init) / std::sqrt(ratio * ratio - 1.0)
                  : std::abs(far->first - z0_init) + 1e-6;
  }
  const double z_span =
      std::max_element(z_radius.begin(), z_radius.end())->first -
      std::min_element(z_radius.begin(), z_radius.end())->first;

  auto residuals = [&](const std::vector<double>& p) {
    const double w0 = p[0], z0 = p[1], zr = p[2];
    std::vector<double> r(z_radius.size());
    for (std::size_t i = 0; i < z_radius.size(); ++i) {
      const double t = (z_radius[i].first - z0) / zr;
      r[i] = s * w0 * std::sqrt(1.0 + t * t) - z_radius[i].second;
    }
    return r;
  };

  LmOptions opt;
  opt.max_iterations = max_iterations;
  opt.positive = {true, false, true};
  opt.scales = {w0_init, std::max(zr_init, 0.25 * z_span), zr_init};
  const FitResult fit = levenberg_marquardt(residuals, {w0_init, z0_init, zr_init}, opt);

  HyperbolaFit out;
  out.w0 = fit.params[0];
  out.z0 = fit.params[1];
  out.zr = std::abs(fit.params[2]);
  out.m2 = pi * out.w0 * out.w0 / (lambda * out.zr);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.covariance[i][j] = fit.covariance[i][j];
  // delta method over (w0, zr)
  const double dw = 2.0 * out.m2 / out.w0;
  const double dz = -out.m2 / out.zr;
  out.m2_sigma = std::sqrt(std::max(
      dw * dw * out.covariance[0][0] + dz * dz * out.covariance[2][2] +
          2.0 * dw * dz * out.covariance[0][2],
      0.0));
  out.residual_rms = fit.residual_rms;
  out.iterations = fit.iterations;
  out.converged = fit.converged;
  return out;
}

HyperbolaFitPair fit_hyperbola(const WidthScan& scan, double lambda, int ell,
                               int max_iterations) {
  std::vector<std::pair<double, double>> hor, ver;
  hor.reserve(scan.size());
  ver.reserve(scan.size());
  for (const auto& s : scan) {
    hor.emplace_back(s.z, s.radius_horizontal);
    ver.emplace_back(s.z, s.radius_vertical);
  }
  return {fit_hyperbola_axis(hor, lambda, ell, max_iterations),
          fit_hyperbola_axis(ver, lambda, ell, max_iterations)};
}

FitResult fit_radius_model(const std::vector<std::pair<int, double>>& data) {
  std::vector<int> distinct;
  for (const auto& [ell, radius] : data) {
    (void)radius;
    const int l = std::abs(ell);
    if (std::find(distinct.begin(), distinct.end(), l) == distinct.end()) distinct.push_back(l);
  }
  if (distinct.size() < 3)
    throw RankDeficientError("radius-model fit needs >= 3 distinct |ell|, got " +
                             std::to_string(distinct.size()));

  // linear in (c0, c1) = (r0, r0*beta): R = c0 + c1 |ell|
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (const auto& [ell, radius] : data) {
    rows.push_back({1.0, double(std::abs(ell))});
    y.push_back(radius);
  }
  FitResult lin = linear_least_squares(rows, y);
  const double c0 = lin.params[0], c1 = lin.params[1];
  if (!(c0 > 0.0)) throw NumericError("radius-model fit produced non-positive r0");

  FitResult out = lin;
  out.params = {c0, c1 / c0};
  // delta method: (r0, beta) = (c0, c1/c0)
  const double a00 = 1.0, a10 = -c1 / (c0 * c0), a11 = 1.0 / c0;
  const auto& cv = lin.covariance;
  out.covariance = {{a00 * a00 * cv[0][0], a00 * (a10 * cv[0][0] + a11 * cv[0][1])},
                    {a00 * (a10 * cv[0][0] + a11 * cv[1][0]),
                     a10 * a10 * cv[0][0] + 2.0 * a10 * a11 * cv[0][1] + a11 * a11 * cv[1][1]}};
  return out;
}

FitResult fit_blue_radius_model(const std::vector<std::pair<int, double>>& data, double zb,
                                double beta_fixed, double lambda_b, double w1_init,
                                double r0_init) {
  if (data.size() < 4)
    throw ValidationError("blue-radius fit needs >= 4 points, got " +
                          std::to_string(data.size()));
  for (const auto& [ell, radius] : data) {
    (void)radius;
    if (ell == 0) throw NoRingError("blue-radius data cannot contain ell = 0");
  }

  auto model = [&](double w1, double r0, int ell) {
    const RadiusModel rm{r0, beta_fixed};
    const double r_ell = beams::radius_model(ell, rm);
    const double w2 = beams::waist_from_ring(r_ell, ell);
    const double r12 = fwm::blue_ring_radius(r_ell, ell, w1);
    const double w12 = fwm::combined_waist(w1, w2);
    return fwm::observed_blue_radius(r12, w12, zb, lambda_b);
  };
  auto residuals = [&](const std::vector<double>& p) {
    std::vector<double> r(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      r[i] = model(p[0], p[1], data[i].first) - data[i].second;
    return r;
  };

  LmOptions opt;
  opt.positive = {true, true};
  opt.scales = {w1_init, r0_init};
  return levenberg_marquardt(residuals, {w1_init, r0_init}, opt);
}

namespace {

// Unit-power LG_{p,l} radial profile at flat phase, evaluated in log domain:
// sqrt(2 p! / (pi (p+|l|)!)) / w * (sqrt(2) r/w)^|l| L_p^|l|(2r^2/w^2) e^{-r^2/w^2}
struct LgBasis {
  int l;
  int p_max;
  double w;
  std::vector<double> log_norm; // per p

  LgBasis(int ell, int p_max_, double waist) : l(std::abs(ell)), p_max(p_max_), w(waist) {
    log_norm.resize(std::size_t(p_max) + 1);
    for (int p = 0; p <= p_max; ++p)
      log_norm[std::size_t(p)] = 0.5 * (std::log(2.0 / pi) + std::lgamma(p + 1.0) -
                                        std::lgamma(p + l + 1.0)) -
                                 std::log(w);
  }

  // radial factor for all p at once via the Laguerre recurrence
  void radial(double r, std::vector<double>& out) const {
    const double rho = r / w;
    const double t = 2.0 * rho * rho;
    double log_common;
    if (l == 0)
      log_common = -rho * rho;
    else if (r == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    } else
      log_common = l * (0.5 * std::log(2.0) + std::log(rho)) - rho * rho;

    double lk_m1 = 0.0, lk = 1.0; // L_{-1} = 0, L_0 = 1
    for (int p = 0; p <= p_max; ++p) {
      out[std::size_t(p)] = std::exp(log_norm[std::size_t(p)] + log_common) * lk;
      const double lk_p1 = ((2 * p + 1 + l - t) * lk - (p + l) * lk_m1) / (p + 1);
      lk_m1 = lk;
      lk = lk_p1;
    }
  }
};

// c_p = <LG_p | field> for every p in one pass over the grid.
std::vector<std::complex<double>> project_all(const ComplexFieldGrid& field, int ell,
                                              double waist, int p_max) {
  const LgBasis basis(ell, p_max, waist);
  std::vector<std::complex<double>> coeffs(std::size_t(p_max) + 1, {0.0, 0.0});
  std::vector<double> radial(std::size_t(p_max) + 1);
  for (int iy = 0; iy < field.n; ++iy) {
    const double yv = field.y(iy);
    for (int ix = 0; ix < field.n; ++ix) {
      const double xv = field.x(ix);
      const std::complex<double> v = field.at(ix, iy);
      if (v == std::complex<double>(0.0, 0.0)) continue;
      const double r = std::hypot(xv, yv);
      basis.radial(r, radial);
      const double theta = std::atan2(yv, xv);
      const std::complex<double> rotated = v * std::polar(1.0, -ell * theta);
      for (int p = 0; p <= p_max; ++p) coeffs[std::size_t(p)] += radial[std::size_t(p)] * rotated;
    }
  }
  const double da = field.pitch * field.pitch;
  for (auto& c : coeffs) c *= da;
  return coeffs;
}

double c0_power(const ComplexFieldGrid& field, int ell, double waist) {
  const auto c = project_all(field, ell, waist, 0);
  return std::norm(c[0]);
}

} // namespace

ModalSpectrum lg_decompose(const ComplexFieldGrid& field, int ell, double basis_waist,
                           int p_max) {
  if (p_max < 5) throw ValidationError("modal decomposition needs p_max >= 5");

  double waist = basis_waist;
  if (waist <= 0.0) {
    // golden-section maximization of |c_0|^2 over the basis waist
    const auto ring = measure_ring_radius(field);
    double w_est = ring.is_ring && ell != 0
                       ? ring.radius / std::sqrt(std::abs(ell) / 2.0)
                       : std::sqrt(2.0) * field.extent() / 16.0;
    double a = w_est / 3.0, b = w_est * 3.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = c0_power(field, ell, x1), f2 = c0_power(field, ell, x2);
    while (b - a > 1e-4 * w_est) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = c0_power(field, ell, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = c0_power(field, ell, x2);
      }
    }
    waist = 0.5 * (a + b);
  }

  // sampling rule against the basis mode of highest p (outermost ring at
  // roughly w sqrt(|l|/2 + p))
  const double outer = waist * std::sqrt(std::abs(ell) / 2.0 + p_max + 1.0);
  double pitch_limit = waist / 8.0;
  if (ell != 0) pitch_limit = std::min(pitch_limit, waist * std::sqrt(std::abs(ell) / 2.0) /
                                                        (4.0 * std::abs(ell)));
  if (field.pitch > pitch_limit || field.extent() < 4.0 * outer)
    throw SamplingError("field grid undersamples the decomposition basis");

  ModalSpectrum spec;
  spec.ell = ell;
  spec.basis_waist = waist;
  spec.coeffs = project_all(field, ell, waist, p_max);
  spec.field_power = field.power();
  for (const auto& c : spec.coeffs) spec.captured_power += std::norm(c);
  spec.purity = spec.captured_power > 0.0 ? std::norm(spec.coeffs[0]) / spec.captured_power : 0.0;
  return spec;
}

int phase_winding(const ComplexFieldGrid& field, double radius) {
  const int samples = std::max(256, 2 * int(2.0 * pi * radius / field.pitch));
  double total = 0.0;
  std::complex<double> prev = field.sample_bilinear(radius, 0.0);
  for (int j = 1; j <= samples; ++j) {
    const double theta = 2.0 * pi * j / samples;
    const std::complex<double> cur =
        field.sample_bilinear(radius * std::cos(theta), radius * std::sin(theta));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return int(std::lround(total / (2.0 * pi)));
}

} // namespace analysis
} // namespace vortex
