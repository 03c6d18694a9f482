#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vortex/analysis.hpp"
#include "vortex/beams.hpp"
#include "vortex/units.hpp"

using namespace vortex;
using namespace vortex::units;
namespace vb = vortex::beams;

namespace {
const RadiusModel kPaperModel{0.045_mm, 0.51};
}

TEST_CASE("gaussian on-axis peak intensity") {
  const BeamSpec spec{780.0_nm, 0.17_mm, 0, 0, 0.1_W, 0.0};
  const auto amp = vb::lg_field_amplitude(spec, 0.0, 0.0, 0.0);
  CHECK(std::norm(amp) == doctest::Approx(2.0 * 0.1 / (pi * 0.17e-3 * 0.17e-3)).epsilon(1e-12));
}

TEST_CASE("vortex core is dark at any plane") {
  const BeamSpec spec{776.0_nm, 0.1_mm, 7, 0, 0.1_W, 0.0};
  CHECK(std::abs(vb::lg_field_amplitude(spec, 0.0, 0.3, 0.0)) == 0.0);
  CHECK(std::abs(vb::lg_field_amplitude(spec, 0.0, 1.2, 0.05)) == 0.0);
}

TEST_CASE("amplitude squared integrates to the beam power") {
  // waist recovered from the ring model at ell = 10
  const double w0 = vb::waist_from_ring(vb::radius_model(10, kPaperModel), 10);
  const BeamSpec spec{776.0_nm, w0, 10, 0, 0.1_W, 0.0};
  for (double z : {0.0, 0.02}) {
    const double integral = oracle::integrate_plane(
        [&](double r, double theta) {
          return std::norm(vb::lg_field_amplitude(spec, r, theta, z));
        },
        vb::ring_radius(spec));
    CHECK(integral == doctest::Approx(spec.power).epsilon(1e-6));
  }
}

TEST_CASE("radial intensity closed forms") {
  const BeamSpec gauss{780.0_nm, 0.2_mm, 0, 0, 0.05_W, 0.0};
  const double w = gauss.waist;
  CHECK(vb::intensity_radial(gauss, w, 0.0) ==
        doctest::Approx(2.0 * gauss.power / (pi * w * w) * std::exp(-2.0)).epsilon(1e-12));

  SUBCASE("ring peak sits at w sqrt(|ell|/2)") {
    const BeamSpec ring{776.0_nm, 0.1_mm, 10, 0, 0.1_W, 0.0};
    const double r_peak = oracle::argmax(
        [&](double r) { return vb::intensity_radial(ring, r, 0.0); }, 0.05e-3, 0.5e-3);
    CHECK(r_peak == doctest::Approx(vb::ring_radius(ring)).epsilon(1e-9));
  }

  SUBCASE("power integral for several charges") {
    for (int ell : {0, 1, 10, 30}) {
      const BeamSpec spec{776.0_nm, 0.1_mm, ell, 0, 0.1_W, 0.0};
      const double integral = oracle::integrate_radial(
          [&](double r) { return vb::intensity_radial(spec, r, 0.0) * 2.0 * pi * r; },
          ell == 0 ? spec.waist : vb::ring_radius(spec));
      CHECK(integral == doctest::Approx(spec.power).epsilon(1e-9));
    }
  }
}

TEST_CASE("ring radius and waist are mutual inverses") {
  CHECK(vb::ring_radius(0.1_mm, 2) == doctest::Approx(0.1e-3).epsilon(1e-12));
  CHECK(vb::ring_radius(0.12276_mm, 10) == doctest::Approx(0.2745e-3).epsilon(1e-3));
  CHECK(vb::waist_from_ring(0.068_mm, 1) == doctest::Approx(0.0962e-3).epsilon(1e-3));
  CHECK(vb::waist_from_ring(0.1e-3 * std::sqrt(15.0), 30) ==
        doctest::Approx(0.1e-3).epsilon(1e-12));
  CHECK(vb::waist_from_ring(0.2745_mm, 10) == doctest::Approx(0.12276e-3).epsilon(1e-3));

  for (int ell = 1; ell <= 30; ++ell) {
    const double w0 = 0.137e-3;
    CHECK(vb::waist_from_ring(vb::ring_radius(w0, ell), ell) ==
          doctest::Approx(w0).epsilon(1e-12));
    CHECK(vb::ring_radius(w0, -ell) == vb::ring_radius(w0, ell));
  }

  CHECK_THROWS_AS(vb::ring_radius(0.1e-3, 0), NoRingError);
  CHECK_THROWS_AS(vb::waist_from_ring(0.1e-3, 0), NoRingError);
}

TEST_CASE("rayleigh ranges reproduce the reported values") {
  // drive beam: w1 = 0.17 mm at 780 nm, quoted as 12 cm
  const double zr1 = vb::rayleigh_range(0.17_mm, 780.0_nm);
  CHECK(zr1 == doctest::Approx(0.1164).epsilon(1e-3));
  CHECK(std::abs(zr1 - 0.12) / 0.12 < 0.05);

  // ring-parameterized vortices: ~4 cm at ell = 1, ~14 cm at ell = 30
  const double zr_1 = vb::rayleigh_range(vb::waist_from_ring(0.068_mm, 1), 776.0_nm);
  CHECK(std::abs(zr_1 - 0.04) / 0.04 < 0.10);
  CHECK(zr_1 == doctest::Approx(0.037).epsilon(0.02));

  const double zr_30 = vb::rayleigh_range(vb::waist_from_ring(0.7335_mm, 30), 776.0_nm);
  CHECK(std::abs(zr_30 - 0.14) / 0.14 < 0.10);
  CHECK(zr_30 == doctest::Approx(0.145).epsilon(0.02));

  SUBCASE("ring form equals 2 pi R^2 / (lambda |ell|)") {
    for (int ell : {1, 3, 12, 30}) {
      const double radius = 0.3e-3;
      const double w0 = vb::waist_from_ring(radius, ell);
      CHECK(vb::rayleigh_range(w0, 776.0_nm) ==
            doctest::Approx(2.0 * pi * radius * radius / (776.0_nm * ell)).epsilon(1e-12));
    }
  }
}

TEST_CASE("empirical radius model") {
  CHECK(vb::radius_model(1, kPaperModel) == doctest::Approx(0.068e-3).epsilon(2e-3));
  CHECK(vb::radius_model(30, kPaperModel) == doctest::Approx(0.7335e-3).epsilon(1e-6));
  CHECK(vb::radius_model(-10, kPaperModel) == vb::radius_model(10, kPaperModel));
  CHECK_THROWS_AS(vb::radius_model(0, kPaperModel), NoRingError);
}

TEST_CASE("beam spec validation") {
  BeamSpec bad{776.0_nm, 0.1_mm, 3, 1, 0.1_W, 0.0};
  CHECK_THROWS_AS(bad.validate(), UnsupportedModeError);
  bad.p = 0;
  bad.waist = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidBeamError);
  bad.waist = 0.1e-3;
  bad.power = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidBeamError);
}

TEST_CASE("rasterization: power, ring and winding") {
  SUBCASE("gaussian power within 1e-4") {
    const BeamSpec spec{780.0_nm, 0.15_mm, 0, 0, 0.1_W, 0.0};
    const auto field = vb::rasterize(spec, {512, 1.2e-3 / 512, 0.0});
    CHECK(field.power() == doctest::Approx(spec.power).epsilon(1e-4));
  }

  SUBCASE("ell = 8 ring radius lands within one pixel") {
    const BeamSpec spec{776.0_nm, 0.1_mm, 8, 0, 0.1_W, 0.0};
    const auto field = vb::rasterize(spec, {512, 1.6e-3 / 512, 0.0});
    const auto ring = analysis::measure_ring_radius(field);
    CHECK(ring.is_ring);
    CHECK(std::abs(ring.radius - 0.2e-3) < field.pitch);
  }

  SUBCASE("phase winds by 2 pi ell") {
    for (int ell : {3, -5}) {
      const BeamSpec spec{776.0_nm, 0.1_mm, ell, 0, 0.1_W, 0.0};
      const auto field = vb::rasterize(spec, {512, 1.4e-3 / 512, 0.0});
      CHECK(analysis::phase_winding(field, vb::ring_radius(spec)) == ell);
    }
  }

  SUBCASE("undersampled grids are rejected") {
    const BeamSpec spec{776.0_nm, 0.1_mm, 20, 0, 0.1_W, 0.0};
    // extent fine, but pitch above R/(4 ell)
    CHECK_THROWS_AS(vb::rasterize(spec, {256, 3.2e-3 / 256, 0.0}), UndersampledGridError);
    // extent below 6x the ring diameter scale
    CHECK_THROWS_AS(vb::rasterize(spec, {256, 1.0e-3 / 256, 0.0}), UndersampledGridError);
  }
}

TEST_CASE("rabi scaling of the gaussian drive") {
  CHECK(vb::rabi_at_radius(1.6_GHz, 0.0, 0.17_mm) == 1.6e9);
  // quoted operating point: ~0.1 GHz at the ell = 10 ring
  const double at_ring = vb::rabi_at_radius(1.6_GHz, 0.2745_mm, 0.17_mm);
  CHECK(at_ring == doctest::Approx(0.118e9).epsilon(1e-2));
  CHECK(at_ring / 0.1e9 > 0.5);
  CHECK(at_ring / 0.1e9 < 2.0);
  CHECK(vb::rabi_at_radius(1.6_GHz, 1.0, 0.17_mm) == doctest::Approx(0.0));
}

TEST_CASE("effective two-photon rabi frequency") {
  SUBCASE("quoted order of magnitude") {
    RabiBudget b{0.1_GHz, 0.2_GHz, 1.5_GHz, 0.0, 0.17_mm};
    const auto out = vb::effective_two_photon_rabi(b);
    CHECK(out.omega_eff == doctest::Approx(0.1e9 * 0.2e9 / (2.0 * 1.5e9)).epsilon(1e-12));
    CHECK(out.omega_eff == doctest::Approx(6.7e6).epsilon(0.01));
    CHECK(out.omega_eff / 10e6 > 0.5);
    CHECK(out.omega_eff / 10e6 < 2.0);
  }
  SUBCASE("no second field, no transfer") {
    RabiBudget b{0.1_GHz, 0.0, 1.5_GHz, 0.0, 0.17_mm};
    CHECK(vb::effective_two_photon_rabi(b).omega_eff == 0.0);
  }
  SUBCASE("full chain from the peak value") {
    RabiBudget b{1.6_GHz, 0.2_GHz, 1.5_GHz, vb::radius_model(10, kPaperModel), 0.17_mm};
    const auto out = vb::effective_two_photon_rabi(b);
    CHECK(out.omega_eff == doctest::Approx(7.9e6).epsilon(5e-3));
    CHECK(out.adiabaticity < 0.01); // omega1^2/delta^2 << 1
  }
  SUBCASE("resonance is rejected") {
    RabiBudget b{0.1_GHz, 0.2_GHz, 0.0, 0.0, 0.17_mm};
    CHECK_THROWS_AS(vb::effective_two_photon_rabi(b), ResonanceError);
  }
}

TEST_CASE("transverse power is conserved across charges" * doctest::timeout(120)) {
  for (int ell = 0; ell <= 30; ++ell) {
    const BeamSpec spec{776.0_nm, 0.1_mm, ell, 0, 0.25_W, 0.0};
    const double integral = oracle::integrate_radial(
        [&](double r) { return vb::intensity_radial(spec, r, 0.0) * 2.0 * pi * r; },
        ell == 0 ? spec.waist : vb::ring_radius(spec));
    CHECK(integral == doctest::Approx(spec.power).epsilon(1e-6));

    if (ell != 0) {
      const double r_peak = oracle::argmax(
          [&](double r) { return vb::intensity_radial(spec, r, 0.0); }, 0.2 * vb::ring_radius(spec),
          3.0 * vb::ring_radius(spec));
      CHECK(r_peak == doctest::Approx(vb::ring_radius(spec)).epsilon(1e-9));
    }
  }
}
