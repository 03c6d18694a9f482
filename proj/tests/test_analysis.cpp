#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "vortex/analysis.hpp"
#include "vortex/beams.hpp"
#include "vortex/cli/commands.hpp"
#include "vortex/cli/pipelines.hpp"
#include "vortex/fwm.hpp"
#include "vortex/units.hpp"

using namespace vortex;
using namespace vortex::units;
namespace vb = vortex::beams;
namespace va = vortex::analysis;
namespace vf = vortex::fwm;

namespace {

const RadiusModel kPaperModel{0.045_mm, 0.51};

WidthScan synthetic_scan(double w0, double z0, double zr, int ell,
                         const std::vector<double>& zs) {
  const double s = ell == 0 ? 1.0 : std::sqrt(std::abs(ell) / 2.0);
  WidthScan scan;
  for (double z : zs) {
    const double t = (z - z0) / zr;
    const double radius = s * w0 * std::sqrt(1.0 + t * t);
    scan.push_back({z, radius, radius});
  }
  return scan;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

} // namespace

TEST_CASE("ring radius measurement") {
  SUBCASE("rasterized vortex, product field and gaussian") {
    const BeamSpec vortex{776.0_nm, 0.1_mm, 8, 0, 0.1_W, 0.0};
    const auto field = vb::rasterize(vortex, {512, 1.6e-3 / 512, 0.0});
    const auto ring = va::measure_ring_radius(field);
    CHECK(ring.is_ring);
    CHECK(std::abs(ring.radius - 0.2e-3) < field.pitch);
    CHECK(ring.uncertainty >= 0.5 * field.pitch);

    const auto gauss =
        vb::rasterize({780.0_nm, 0.15_mm, 0, 0, 0.1_W, 0.0}, {512, 1.6e-3 / 512, 0.0});
    const auto flat = va::measure_ring_radius(gauss);
    CHECK_FALSE(flat.is_ring);
    CHECK(flat.radius == 0.0);
  }

  SUBCASE("a beam parked far off center is rejected") {
    ComplexFieldGrid field(256, 8e-6, 420.0e-9, 0.0);
    const double x0 = 0.3 * field.extent(), w = 0.1e-3;
    for (int iy = 0; iy < field.n; ++iy)
      for (int ix = 0; ix < field.n; ++ix) {
        const double dx = field.x(ix) - x0, dy = field.y(iy);
        field.at(ix, iy) = std::exp(-(dx * dx + dy * dy) / (w * w));
      }
    CHECK_THROWS_AS(va::measure_ring_radius(field), ValidationError);
  }

  SUBCASE("invariant under a global phase and quarter turns") {
    const BeamSpec vortex{776.0_nm, 0.11_mm, 6, 0, 0.1_W, 0.0};
    auto field = vb::rasterize(vortex, {512, 1.8e-3 / 512, 0.0});
    const double r0 = va::measure_ring_radius(field).radius;

    auto shifted = field;
    for (auto& v : shifted.data) v *= std::polar(1.0, 1.234);
    CHECK(va::measure_ring_radius(shifted).radius == doctest::Approx(r0).epsilon(1e-4));

    ComplexFieldGrid rotated(field.n, field.pitch, field.wavelength, field.z);
    for (int iy = 0; iy < field.n; ++iy)
      for (int ix = 0; ix < field.n; ++ix)
        rotated.at(ix, iy) = field.at(iy, field.n - 1 - ix);
    CHECK(std::abs(va::measure_ring_radius(rotated).radius - r0) < field.pitch);
  }
}

TEST_CASE("fringe counting on tilted-lens patterns" * doctest::timeout(600)) {
  SUBCASE("single fringe at ell = 1") {
    const auto pattern = cli::tilted_lens_pattern(0.2_mm, 420.0_nm, 1, 0.5, 25.0_deg);
    const auto fringes = va::count_dark_fringes(pattern, 0.0);
    CHECK(fringes.count == 1);
    CHECK(fringes.sign == 1);
  }
  SUBCASE("ell = -7 mirrors ell = +7") {
    const auto plus = cli::tilted_lens_pattern(0.2_mm, 420.0_nm, 7, 0.5, 25.0_deg);
    const auto minus = cli::tilted_lens_pattern(0.2_mm, 420.0_nm, -7, 0.5, 25.0_deg);
    const auto fp = va::count_dark_fringes(plus, 0.0);
    const auto fm = va::count_dark_fringes(minus, 0.0);
    CHECK(fp.count == 7);
    CHECK(fm.count == 7);
    CHECK(fp.sign == 1);
    CHECK(fm.sign == -1);
  }
  SUBCASE("no charge, no dark fringe") {
    const auto pattern = cli::tilted_lens_pattern(0.2_mm, 420.0_nm, 0, 0.5, 25.0_deg);
    const auto fringes = va::count_dark_fringes(pattern, 0.0);
    CHECK(fringes.count == 0);
    CHECK(fringes.sign == 0);
  }

  SUBCASE("washed-out ripples raise a low-contrast error") {
    // shallow diagonal modulation on a gaussian envelope: minima exist but
    // none dips 20% below its neighbors
    ComplexFieldGrid field(256, 4e-6, 420.0e-9, 0.0);
    const double w = 0.15e-3;
    for (int iy = 0; iy < field.n; ++iy)
      for (int ix = 0; ix < field.n; ++ix) {
        const double x = field.x(ix), y = field.y(iy);
        const double u = (x + y) / std::sqrt(2.0);
        const double envelope = std::exp(-(x * x + y * y) / (w * w));
        field.at(ix, iy) = envelope * std::sqrt(1.0 + 0.05 * std::cos(2.0 * pi * u / 4e-5));
      }
    CHECK_THROWS_AS(va::count_dark_fringes(field, 0.0, 0.2), LowContrastError);
  }
}

TEST_CASE("hyperbola fits") {
  const double w0 = 0.095e-3, z0 = 0.012, zr = 0.0675;
  const auto zs = linspace(z0 - 2.0 * zr, z0 + 2.0 * zr, 11);

  SUBCASE("noiseless inverse crime recovers the generator") {
    const auto scan = synthetic_scan(w0, z0, zr, 4, zs);
    const auto fit = va::fit_hyperbola(scan, 420.0_nm, 4);
    CHECK(fit.horizontal.converged);
    // converged means the gradient actually vanished at the optimum
    CHECK(fit.horizontal.residual_rms < 1e-9 * w0);
    CHECK(fit.horizontal.w0 == doctest::Approx(w0).epsilon(1e-6));
    CHECK(fit.horizontal.z0 == doctest::Approx(z0).epsilon(1e-6));
    CHECK(fit.horizontal.zr == doctest::Approx(zr).epsilon(1e-6));
    CHECK(fit.horizontal.m2 ==
          doctest::Approx(pi * w0 * w0 / (420.0e-9 * zr)).epsilon(1e-6));
    // the generator here is its own model, so M2 is by construction
    CHECK(fit.vertical.m2 == doctest::Approx(fit.horizontal.m2).epsilon(1e-9));
  }

  SUBCASE("doubling zr at fixed w0 halves M2") {
    const auto fit1 = va::fit_hyperbola_axis(
        [&] {
          std::vector<std::pair<double, double>> d;
          for (const auto& s : synthetic_scan(w0, z0, zr, 4, zs)) d.emplace_back(s.z, s.radius_horizontal);
          return d;
        }(),
        420.0_nm, 4);
    const auto zs2 = linspace(z0 - 4.0 * zr, z0 + 4.0 * zr, 11);
    const auto fit2 = va::fit_hyperbola_axis(
        [&] {
          std::vector<std::pair<double, double>> d;
          for (const auto& s : synthetic_scan(w0, z0, 2.0 * zr, 4, zs2)) d.emplace_back(s.z, s.radius_horizontal);
          return d;
        }(),
        420.0_nm, 4);
    CHECK(fit2.m2 == doctest::Approx(0.5 * fit1.m2).epsilon(1e-9));
  }

  SUBCASE("unbiased under 1 percent multiplicative noise") {
    std::mt19937_64 rng(20260810);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> w0s, m2s;
    for (int trial = 0; trial < 100; ++trial) {
      auto scan = synthetic_scan(w0, z0, zr, 4, zs);
      for (auto& s : scan) {
        s.radius_horizontal *= 1.0 + 0.01 * gauss(rng);
        s.radius_vertical = s.radius_horizontal;
      }
      const auto fit = va::fit_hyperbola(scan, 420.0_nm, 4).horizontal;
      w0s.push_back(fit.w0);
      m2s.push_back(fit.m2);
    }
    auto mean_sem = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= double(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      var /= double(v.size() - 1);
      return std::pair{mean, std::sqrt(var / double(v.size()))};
    };
    const auto [w0_mean, w0_sem] = mean_sem(w0s);
    CHECK(std::abs(w0_mean - w0) <= 2.0 * w0_sem);
    const auto [m2_mean, m2_sem] = mean_sem(m2s);
    CHECK(std::abs(m2_mean - pi * w0 * w0 / (420.0e-9 * zr)) <= 2.0 * m2_sem);
  }

  SUBCASE("iteration starvation reports failure with the best point so far") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto scan = synthetic_scan(w0, z0, zr, 4, zs);
    for (auto& s : scan) s.radius_horizontal *= 1.0 + 0.05 * gauss(rng);
    const auto fit = va::fit_hyperbola(scan, 420.0_nm, 4, 1).horizontal;
    CHECK_FALSE(fit.converged);
    CHECK(std::isfinite(fit.w0));
    CHECK(fit.w0 > 0.0);
  }

  SUBCASE("too few points") {
    const auto scan = synthetic_scan(w0, z0, zr, 4, linspace(0.0, zr, 3));
    CHECK_THROWS_AS(va::fit_hyperbola(scan, 420.0_nm, 4), ValidationError);
  }
}

TEST_CASE("radius model fit") {
  SUBCASE("exact synthetic data") {
    std::vector<std::pair<int, double>> data;
    for (int ell = 1; ell <= 30; ++ell) data.emplace_back(ell, vb::radius_model(ell, kPaperModel));
    const auto fit = va::fit_radius_model(data);
    CHECK(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(0.045e-3).epsilon(1e-10));
    CHECK(fit.params[1] == doctest::Approx(0.51).epsilon(1e-10));
  }

  SUBCASE("radii measured off rasterized beams recover the generator") {
    std::vector<std::pair<int, double>> data;
    for (int ell = 1; ell <= 30; ++ell) {
      const double r_ell = vb::radius_model(ell, kPaperModel);
      const double w2 = vb::waist_from_ring(r_ell, ell);
      const double pitch = std::min(w2 / 8.5, r_ell / (4.2 * ell));
      const double extent = 6.2 * std::max(w2, r_ell);
      const int n = std::max(256, int(std::bit_ceil(std::uint64_t(extent / pitch))));
      const auto field = vb::rasterize({776.0_nm, w2, ell, 0, 0.1_W, 0.0}, {n, extent / n, 0.0});
      data.emplace_back(ell, va::measure_ring_radius(field).radius);
    }
    const auto fit = va::fit_radius_model(data);
    // generator values within the quoted uncertainty bands
    CHECK(std::abs(fit.params[0] - 0.045e-3) < 0.004e-3);
    CHECK(std::abs(fit.params[1] - 0.51) < 0.07);
  }

  SUBCASE("single |ell| is rank deficient") {
    std::vector<std::pair<int, double>> data{{5, 1e-4}, {-5, 1.1e-4}, {5, 0.9e-4}};
    CHECK_THROWS_AS(va::fit_radius_model(data), RankDeficientError);
  }
}

TEST_CASE("blue radius model fit" * doctest::timeout(600)) {
  const double zb = 0.4;
  const double lambda_b = vf::blue_wavelength(780.0_nm, 776.0_nm, 5.23_um);
  const double w1_true = 0.15e-3, r0_true = 0.06e-3, beta = 0.51;

  auto forward = [&](int ell) {
    const double r_ell = vb::radius_model(ell, {r0_true, beta});
    const double w2 = vb::waist_from_ring(r_ell, ell);
    return vf::observed_blue_radius(vf::blue_ring_radius(r_ell, ell, w1_true),
                                    vf::combined_waist(w1_true, w2), zb, lambda_b);
  };

  SUBCASE("noiseless inverse crime") {
    std::vector<std::pair<int, double>> data;
    for (int ell = 1; ell <= 20; ++ell) data.emplace_back(ell, forward(ell));
    const auto fit = va::fit_blue_radius_model(data, zb, beta, lambda_b);
    CHECK(fit.converged);
    // the converged flag is backed by a vanished gradient
    CHECK(fit.gradient_norm <= 1e-10 * (1.0 + fit.residual_rms));
    CHECK(fit.params[0] == doctest::Approx(w1_true).epsilon(1e-6));
    CHECK(fit.params[1] == doctest::Approx(r0_true).epsilon(1e-6));
  }

  SUBCASE("doubled initial guess lands in the same basin") {
    std::vector<std::pair<int, double>> data;
    for (int ell = 1; ell <= 20; ++ell) data.emplace_back(ell, forward(ell));
    const auto fit = va::fit_blue_radius_model(data, zb, beta, lambda_b, 2e-4, 1e-4);
    CHECK(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(w1_true).epsilon(1e-6));
    CHECK(fit.params[1] == doctest::Approx(r0_true).epsilon(1e-6));
  }

  SUBCASE("grid pipeline data recover the generator within the quoted bands") {
    auto cfg = cli::default_config("radius-sweep");
    std::vector<std::pair<int, double>> data;
    for (int ell = 2; ell <= 20; ell += 2)
      data.emplace_back(ell, cli::run_blue_pipeline(cfg, ell).rb_grid);
    const auto fit = va::fit_blue_radius_model(data, cfg.zb, cfg.beta, cfg.lambda_blue());
    CHECK(fit.converged);
    CHECK(std::abs(fit.params[0] - cfg.w1) < 0.02e-3);
    CHECK(std::abs(fit.params[1] - cfg.r0) < 0.01e-3);
  }

  SUBCASE("ell = 0 rows are rejected") {
    std::vector<std::pair<int, double>> data{{0, 1e-4}, {1, 2e-4}, {2, 3e-4}, {3, 4e-4}};
    CHECK_THROWS_AS(va::fit_blue_radius_model(data, zb, beta, lambda_b), NoRingError);
  }
}

TEST_CASE("modal decomposition" * doctest::timeout(600)) {
  SUBCASE("pure mode projects onto itself") {
    const BeamSpec spec{420.0_nm, 0.1_mm, 8, 0, 0.1_W, 0.0};
    const auto field = vb::rasterize(spec, {512, 2.2e-3 / 512, 0.0});
    const auto spectrum = va::lg_decompose(field, 8, spec.waist, 8);
    CHECK(spectrum.purity >= 0.999);
    CHECK(spectrum.captured_power <= spectrum.field_power * (1.0 + 1e-9));
    CHECK(spectrum.captured_power == doctest::Approx(spectrum.field_power).epsilon(1e-3));
  }

  SUBCASE("product field is a near-pure mode with an optimized basis") {
    auto cfg = cli::default_config("radius-sweep");
    const auto geo = cli::blue_geometry(8, cfg.w1, cfg.r0, cfg.beta, 0.0, cfg.lambda_blue());
    const auto grid = cli::auto_product_grid(geo, cfg.w1, 0.0, 0, 0.0);
    const auto blue = cli::make_product_field(cfg, geo, grid);
    const auto spectrum = va::lg_decompose(blue, 8, 0.0, 8);
    CHECK(spectrum.purity >= 0.99);
    CHECK(spectrum.basis_waist == doctest::Approx(geo.w12).epsilon(0.02));
  }

  SUBCASE("a narrower pump cleans an impure vortex") {
    // input mode with a deliberate p = 1 admixture
    const int ell = 6;
    const double w2 = 0.12e-3;
    const int n = 1024;
    const double pitch = 2.6e-3 / n;
    double purities[3];
    int idx = 0;
    for (double ring_over_w1 : {1.0, 2.0, 4.0}) {
      const double r_ell = w2 * std::sqrt(ell / 2.0);
      const double w1 = r_ell / ring_over_w1;
      ComplexFieldGrid field(n, pitch, 420.0e-9, 0.0);
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const double x = field.x(ix), y = field.y(iy);
          const double r = std::hypot(x, y), theta = std::atan2(y, x);
          const double t = 2.0 * r * r / (w2 * w2);
          const double envelope = std::pow(r * std::sqrt(2.0) / w2, ell) * std::exp(-r * r / (w2 * w2));
          const double laguerre1 = 1.0 + ell - t; // L_1^ell
          const std::complex<double> mode =
              envelope * (1.0 + 0.35 * laguerre1) * std::polar(1.0, ell * theta);
          field.at(ix, iy) = mode * std::exp(-r * r / (w1 * w1)); // pump envelope
        }
      purities[idx++] = va::lg_decompose(field, ell, 0.0, 8).purity;
    }
    CHECK(purities[1] >= purities[0] - 1e-9);
    CHECK(purities[2] >= purities[1] - 1e-9);
    CHECK(purities[2] > purities[0]);
  }

  SUBCASE("undersampled basis is rejected") {
    const BeamSpec spec{420.0_nm, 0.1_mm, 3, 0, 0.1_W, 0.0};
    const auto field = vb::rasterize(spec, {512, 2.0e-3 / 512, 0.0});
    CHECK_THROWS_AS(va::lg_decompose(field, 3, 0.004e-3, 8), SamplingError);
    CHECK_THROWS_AS(va::lg_decompose(field, 3, 0.1e-3, 3), ValidationError);
  }
}
