#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "vortex/analysis.hpp"
#include "vortex/beams.hpp"
#include "vortex/cli/commands.hpp"
#include "vortex/propagation.hpp"
#include "vortex/units.hpp"

using namespace vortex;
using namespace vortex::units;
namespace vb = vortex::beams;
namespace vp = vortex::prop;

TEST_CASE("analytic propagation landmarks") {
  const BeamSpec spec{420.0_nm, 0.1_mm, 4, 0, 1.0_W, 0.0};
  const double zr = vb::rayleigh_range(spec);

  SUBCASE("waist plane") {
    const auto p = vp::propagate_analytic(spec, 0.0);
    CHECK(p.w == spec.waist);
    CHECK(p.gouy == 0.0);
    CHECK(std::isinf(p.curvature_radius));
  }
  SUBCASE("one rayleigh range out") {
    const auto p = vp::propagate_analytic(spec, zr);
    CHECK(p.w == doctest::Approx(spec.waist * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(p.gouy == doctest::Approx(5.0 * pi / 4.0).epsilon(1e-12));
    CHECK(p.curvature_radius == doctest::Approx(2.0 * zr).epsilon(1e-12));
    CHECK(p.ring_radius == doctest::Approx(p.w * std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("blue-beam expansion factor over 400 mm") {
    const BeamSpec blue{420.0_nm, 0.095_mm, 10, 0, 1.0_W, 0.0};
    const double zrb = vb::rayleigh_range(blue);
    CHECK(zrb == doctest::Approx(0.0675).epsilon(1e-3));
    const auto p = vp::propagate_analytic(blue, 0.4);
    CHECK(p.w / blue.waist == doctest::Approx(6.0).epsilon(0.01));
  }
}

TEST_CASE("grid propagation is unitary and reversible") {
  const BeamSpec spec{420.0_nm, 0.1_mm, 4, 0, 1.0_W, 0.0};
  const double zr = vb::rayleigh_range(spec);
  const auto field = vb::rasterize(spec, {512, 6.0e-6, 0.0});

  SUBCASE("zero step is the identity") {
    const auto same = vp::propagate_grid(field, 0.0);
    CHECK(same.data == field.data);
    CHECK(same.z == field.z);
  }

  SUBCASE("power conservation and round trip") {
    const auto fwd = vp::propagate_grid(field, zr);
    CHECK(fwd.power() == doctest::Approx(field.power()).epsilon(1e-6));

    const auto back = vp::propagate_grid(fwd, -zr);
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < field.data.size(); ++i) {
      diff2 += std::norm(back.data[i] - field.data[i]);
      norm2 += std::norm(field.data[i]);
    }
    CHECK(std::sqrt(diff2 / norm2) < 1e-8);
  }

  SUBCASE("winding is preserved in flight") {
    const auto fwd = vp::propagate_grid(field, 0.5 * zr);
    const auto p = vp::propagate_analytic(spec, 0.5 * zr);
    CHECK(analysis::phase_winding(fwd, p.ring_radius) == spec.ell);
  }

  SUBCASE("aperture overflow raises") {
    CHECK_THROWS_AS(vp::propagate_grid(field, 10.0), ApertureOverflowError);
  }
}

TEST_CASE("ring radius tracks the analytic hyperbola within one pixel") {
  for (int ell : {2, 4, 7, 12}) {
    const BeamSpec spec{420.0_nm, 0.08_mm, ell, 0, 1.0_W, 0.0};
    const double zr = vb::rayleigh_range(spec);
    const double ring = vb::ring_radius(spec);
    // size for growth 1 + z/zr = 3 at two rayleigh ranges
    const double pitch = std::min({spec.waist / 8.5, ring / (4.2 * std::abs(ell))});
    const int n = 1024;
    const auto field = vb::rasterize(spec, {n, std::max(pitch, 9.6 * ring / n), 0.0});

    vp::FieldPropagator propagator(field);
    for (double frac : {0.5, 1.0, 2.0}) {
      const auto plane = propagator.to(frac * zr);
      const auto measured = analysis::measure_ring_radius(plane);
      const auto expected = vp::propagate_analytic(spec, frac * zr).ring_radius;
      CHECK(measured.is_ring);
      CHECK(std::abs(measured.radius - expected) < plane.pitch);
    }
  }
}

TEST_CASE("width scans") {
  const BeamSpec spec{420.0_nm, 0.095_mm, 8, 0, 1.0_W, 0.0};
  const double zr = vb::rayleigh_range(spec);
  const auto field = vb::rasterize(spec, {1024, 3.4e-6, 0.0});

  SUBCASE("circular symmetry at the waist") {
    const auto s = vp::measure_widths(field, WidthMethod::ring_peak);
    CHECK(std::abs(s.radius_horizontal - s.radius_vertical) < field.pitch);
    CHECK(s.radius_horizontal == doctest::Approx(vb::ring_radius(spec)).epsilon(0.01));
  }

  SUBCASE("scan symmetric about the waist") {
    const auto scan =
        vp::width_scan(field, {-0.6 * zr, -0.3 * zr, 0.0, 0.3 * zr, 0.6 * zr},
                       WidthMethod::ring_peak);
    CHECK(std::abs(scan.front().radius_horizontal - scan.back().radius_horizontal) <
          field.pitch);
    CHECK(std::abs(scan[1].radius_vertical - scan[3].radius_vertical) < field.pitch);
  }

  SUBCASE("eleven-plane scan recovers M2 = 1") {
    std::vector<double> zs;
    for (int i =  0; i < 11; ++i) zs.push_back(2.0 * zr * i / 10.0);
    const auto scan = vp::width_scan(field, zs, WidthMethod::ring_peak);
    const auto fits = analysis::fit_hyperbola(scan, spec.wavelength, spec.ell);
    CHECK(fits.horizontal.converged);
    CHECK(fits.horizontal.m2 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(fits.vertical.m2 == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("gaussian focus scan through a plain lens gives M2 = 1") {
  const BeamSpec spec{420.0_nm, 0.2_mm, 0, 0, 1.0_W, 0.0};
  const auto at_lens = vb::rasterize(spec, {512, 6.4e-6, 0.0});
  const auto after = vp::apply_tilted_lens(at_lens, 0.08, 0.0);

  const double zr = vb::rayleigh_range(spec);
  const double z_focus = 0.08 / (1.0 + std::pow(0.08 / zr, 2));
  std::vector<double> zs;
  for (int i = 0; i < 9; ++i) zs.push_back(z_focus - 0.03 + 0.06 * i / 8.0);
  const auto scan = vp::width_scan(after, zs, WidthMethod::d4sigma);
  const auto fit = analysis::fit_hyperbola(scan, spec.wavelength, 0).horizontal;
  CHECK(fit.converged);
  CHECK(fit.m2 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("tilted lens turns charge into countable fringes" * doctest::timeout(600)) {
  SUBCASE("no tilt, no fringes: the ring refocuses to a ring") {
    const auto pattern = cli::tilted_lens_pattern(0.2_mm, 420.0_nm, 3, 0.5, 0.0);
    const auto ring = analysis::measure_ring_radius(pattern);
    CHECK(ring.is_ring);
    // isotropic pattern: both diagonals carry the same spread
    const auto s = vp::measure_widths(pattern, WidthMethod::d4sigma);
    CHECK(s.radius_horizontal == doctest::Approx(s.radius_vertical).epsilon(0.02));
  }

  SUBCASE("three dark fringes at ell = +3, mirrored at -3") {
    const auto plus = cli::tilted_lens_pattern(0.2_mm, 420.0_nm, 3, 0.5, 25.0_deg);
    const auto count_plus = analysis::count_dark_fringes(plus, 0.0);
    CHECK(count_plus.count == 3);
    CHECK(count_plus.sign == 1);

    const auto minus = cli::tilted_lens_pattern(0.2_mm, 420.0_nm, -3, 0.5, 25.0_deg);
    const auto count_minus = analysis::count_dark_fringes(minus, 0.0);
    CHECK(count_minus.count == 3);
    CHECK(count_minus.sign == -1);
  }
}

TEST_CASE("raw field dumps round-trip") {
  const BeamSpec spec{776.0_nm, 0.1_mm, 5, 0, 0.1_W, 0.0};
  const auto field = vb::rasterize(spec, {256, 1.4e-3 / 256, 0.02});
  const auto path = std::filesystem::temp_directory_path() / "vortex_ofgd_roundtrip.bin";
  write_ofgd(field, path);
  const auto loaded = read_ofgd(path);
  CHECK(loaded.n == field.n);
  CHECK(loaded.pitch == field.pitch);
  CHECK(loaded.wavelength == field.wavelength);
  CHECK(loaded.z == field.z);
  CHECK(loaded.data == field.data);
  std::filesystem::remove(path);
}
