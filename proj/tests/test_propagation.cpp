#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "aqc/phase_screens.hpp"
#include "aqc/propagation.hpp"
#include "aqc/turbulence.hpp"

using namespace aqc;

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const ChannelGeometry kGeom{808e-9, 10e3, 1, 256, 4e-3, 0.2};
const BeamParams kBeam{0.04, kInf};

double spot_radius_of(const ComplexField& f) {
    double p = 0.0, r2w = 0.0;
    const GridSpec grid = f.grid();
    for (int iy = 0; iy < f.n; ++iy)
        for (int ix = 0; ix < f.n; ++ix) {
            const double w = std::norm(f.values[iy * f.n + ix]);
            const double x = grid.coord(ix), y = grid.coord(iy);
            p += w;
            r2w += (x * x + y * y) * w;
        }
    return std::sqrt(2.0 * r2w / p);
}

}  // namespace

TEST_CASE("source beam is unit power and validated") {
    const ComplexField f = init_gaussian_beam(kBeam, kGeom);
    CHECK(f.power() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.z == 0.0);

    CHECK_THROWS_AS(init_gaussian_beam({-0.01, kInf}, kGeom),
                    std::invalid_argument);
    CHECK_THROWS_AS(init_gaussian_beam({0.04, 0.0}, kGeom),
                    std::invalid_argument);
    // Waist below four grid steps is not resolvable.
    CHECK_THROWS_AS(init_gaussian_beam({0.01, kInf}, kGeom),
                    std::invalid_argument);
}

TEST_CASE("focused source carries the quadratic phase") {
    const BeamParams focused{0.04, 10e3};
    const ComplexField f = init_gaussian_beam(focused, kGeom);
    const double k = kGeom.wavenumber();
    const GridSpec grid = f.grid();
    const double x = grid.coord(200), y = grid.coord(140);
    const double expect = -k * (x * x + y * y) / (2.0 * focused.focal_range);
    const double got = std::arg(f.values[140 * f.n + 200]);
    CHECK(std::remainder(got - expect, 2.0 * M_PI) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("vacuum step conserves power and composes") {
    ComplexField f = init_gaussian_beam(kBeam, kGeom);
    Fft2D fft(kGeom.grid_n);
    const double p0 = f.power();
    vacuum_propagate(f, 4e3, kGeom.wavenumber(), fft);
    CHECK(f.power() == doctest::Approx(p0).epsilon(1e-12));
    CHECK(f.z == doctest::Approx(4e3));

    vacuum_propagate(f, 0.0, kGeom.wavenumber(), fft);  // identity
    CHECK(f.z == doctest::Approx(4e3));
    CHECK_THROWS_AS(vacuum_propagate(f, -1.0, kGeom.wavenumber(), fft),
                    std::invalid_argument);

    // Two 3 km steps equal one 6 km step.
    ComplexField a = init_gaussian_beam(kBeam, kGeom);
    ComplexField b = init_gaussian_beam(kBeam, kGeom);
    vacuum_propagate(a, 3e3, kGeom.wavenumber(), fft);
    vacuum_propagate(a, 3e3, kGeom.wavenumber(), fft);
    vacuum_propagate(b, 6e3, kGeom.wavenumber(), fft);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("propagated spot radius matches the analytic beam law") {
    Fft2D fft(kGeom.grid_n);
    for (double focal : {kInf, 50e3, -30e3}) {
        const BeamParams beam{0.04, focal};
        ComplexField f = init_gaussian_beam(beam, kGeom);
        vacuum_propagate(f, kGeom.z_ap, kGeom.wavenumber(), fft);
        const double w_ana =
            gaussian_spot_radius(beam, kGeom.z_ap, kGeom.wavenumber());
        CHECK(std::abs(spot_radius_of(f) / w_ana - 1.0) < 0.01);
    }
}

TEST_CASE("screens only change the phase") {
    ComplexField f = init_gaussian_beam(kBeam, kGeom);
    const ComplexField before = f;
    std::vector<double> phi(f.values.size());
    for (std::size_t i = 0; i < phi.size(); ++i)
        phi[i] = std::sin(static_cast<double>(i));
    apply_screen(f, phi.data(), phi.size());
    for (std::size_t i = 0; i < phi.size(); i += 997)
        CHECK(std::abs(f.values[i]) ==
              doctest::Approx(std::abs(before.values[i])).epsilon(1e-14));
    CHECK_THROWS_AS(apply_screen(f, phi.data(), phi.size() - 1),
                    std::invalid_argument);
}

TEST_CASE("aperture transmittance against the closed form") {
    Fft2D fft(kGeom.grid_n);
    ComplexField f = init_gaussian_beam(kBeam, kGeom);
    vacuum_propagate(f, kGeom.z_ap, kGeom.wavenumber(), fft);
    const double w =
        gaussian_spot_radius(kBeam, kGeom.z_ap, kGeom.wavenumber());
    for (double r_ap : {0.05, 0.1, 0.2}) {
        const double expect = 1.0 - std::exp(-2.0 * r_ap * r_ap / (w * w));
        CHECK(std::abs(aperture_transmittance(f, r_ap) / expect - 1.0) <
              0.01);
    }
    // R = 0 keeps at most the single on-axis grid cell.
    CHECK(aperture_transmittance(f, 0.0) < 1e-2);
    CHECK_THROWS_AS(aperture_transmittance(f, -0.1), std::invalid_argument);
}

TEST_CASE("channel with silent screens reduces to vacuum propagation") {
    const auto turb = TurbulenceParams::make(2e-15, 1e-3, 80.0);
    ChannelGeometry g = kGeom;
    g.n_screens = 4;
    const RingTable table(turb, g.wavenumber(), g.slab_thickness(), 32);
    SparseScreenSet set = sample_screen_set(table, g, 1);
    for (auto& s : set.screens)
        for (auto& m : s.modes) m.amplitude = 0.0;

    Fft2D fft(g.grid_n);
    PropagationWorkspace ws;
    const PropagationResult res =
        propagate_channel(set, 0.0, g, kBeam, fft, ws);
    CHECK_FALSE(res.flagged);
    const double w = gaussian_spot_radius(kBeam, g.z_ap, g.wavenumber());
    const double expect = 1.0 - std::exp(-2.0 * 0.04 / (w * w));
    CHECK(std::abs(aperture_transmittance(res.field, 0.2) / expect - 1.0) <
          0.01);
    CHECK(res.field.z == doctest::Approx(g.z_ap).epsilon(1e-12));
}

TEST_CASE("turbulent channel transmittance is a valid fraction") {
    const auto turb = TurbulenceParams::make(2e-15, 1e-3, 80.0);
    ChannelGeometry g{808e-9, 10e3, 4, 128, 4e-3, 0.1};
    const RingTable table(turb, g.wavenumber(), g.slab_thickness(), 64);
    Fft2D fft(g.grid_n);
    PropagationWorkspace ws;
    for (int r = 0; r < 5; ++r) {
        const auto set = sample_screen_set(table, g, 100 + r);
        const auto res = propagate_channel(set, 0.01, g, kBeam, fft, ws);
        const double eta = aperture_transmittance(res.field, 0.1);
        CHECK(eta >= 0.0);
        CHECK(eta <= 1.0);
    }
}

TEST_CASE("aliasing guard flags beams that outgrow the grid") {
    // 64 x 1 mm grid is 6.4 cm wide; a 4 mm waist spreads to ~13 cm
    // after 2 km, so most power hits the absorbing boundary.
    const auto turb = TurbulenceParams::make(1e-16, 1e-3, 80.0);
    ChannelGeometry g{808e-9, 2e3, 2, 64, 1e-3, 0.02};
    const RingTable table(turb, g.wavenumber(), g.slab_thickness(), 32);
    const auto set = sample_screen_set(table, g, 3);
    Fft2D fft(g.grid_n);
    PropagationWorkspace ws;
    const BeamParams tight{4e-3, kInf};
    const auto res = propagate_channel(set, 0.0, g, tight, fft, ws);
    CHECK(res.flagged);
}

TEST_CASE("screen count must match the geometry") {
    const auto turb = TurbulenceParams::make(2e-15, 1e-3, 80.0);
    ChannelGeometry g = kGeom;
    g.n_screens = 3;
    const RingTable table(turb, g.wavenumber(), g.slab_thickness(), 32);
    auto set = sample_screen_set(table, g, 1);
    set.screens.pop_back();
    Fft2D fft(g.grid_n);
    PropagationWorkspace ws;
    CHECK_THROWS_AS(propagate_channel(set, 0.0, g, kBeam, fft, ws),
                    std::invalid_argument);
}
