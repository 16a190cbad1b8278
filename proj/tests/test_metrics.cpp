#include "otfsaf/constellation.hpp"
#include "otfsaf/metrics.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace otfsaf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

AfGrid constant_grid(std::vector<double> taus, std::vector<double> fds, Complex v) {
    AfGrid g;
    g.axes = {std::move(taus), std::move(fds)};
    g.values = ComplexMatrix(g.axes.tau_values.size(), g.axes.fd_values.size(), v);
    return g;
}

const MainlobeRegion kUnit{1.0, 1.0};

}  // namespace

TEST_CASE("PSLR of a synthetic grid") {
    AfGrid g = constant_grid({-2, -1, 0, 1, 2}, {-2, -1, 0, 1, 2}, 0.1);
    g.values(2, 2) = 1.0;
    g.values(2, 3) = 0.9;  // (0, 1): on the closed edge, counts as sidelobe
    g.values(1, 1) = 0.5;
    const PslrResult r = pslr(g, kUnit);
    CHECK_THAT(r.pslr_db, WithinAbs(20.0 * std::log10(0.9), 1e-12));
    CHECK(r.location.tau == 0.0);
    CHECK(r.location.fd == 1.0);

    g.values(2, 3) = 0.1;
    CHECK_THAT(pslr(g, kUnit).pslr_db, WithinAbs(-20.0 * std::log10(2.0), 1e-12));
    CHECK_THAT(pslr(g, kUnit).pslr_db, WithinAbs(-6.0206, 1e-4));
}

TEST_CASE("PSLR ties break toward the smallest |tau| then |fd|") {
    AfGrid g = constant_grid({-2, -1, 0, 1, 2}, {-2, -1, 0, 1, 2}, 0.0);
    g.values(2, 2) = 2.0;
    g.values(4, 0) = 1.0;  // (2, -2)
    g.values(3, 4) = 1.0;  // (1, 2)
    g.values(3, 3) = 1.0;  // (1, 1)
    const PslrResult r = pslr(g, kUnit);
    CHECK(r.location.tau == 1.0);
    CHECK(r.location.fd == 1.0);
    CHECK_THAT(r.pslr_db, WithinAbs(20.0 * std::log10(0.5), 1e-12));
}

TEST_CASE("PSLR edge cases") {
    SECTION("all sidelobes zero") {
        AfGrid g = constant_grid({-1, 0, 1}, {-1, 0, 1}, 0.0);
        g.values(1, 1) = 3.0;
        CHECK(pslr(g, kUnit).pslr_db == -std::numeric_limits<double>::infinity());
    }
    SECTION("no sidelobe samples") {
        const AfGrid g = constant_grid({-0.5, 0, 0.5}, {-0.5, 0, 0.5}, 1.0);
        CHECK_THROWS_AS(pslr(g, kUnit), NoSidelobeSamples);
    }
    SECTION("zero peak") {
        AfGrid g = constant_grid({-1, 0, 1}, {-1, 0, 1}, 1.0);
        g.values(1, 1) = 0.0;
        CHECK_THROWS_AS(pslr(g, kUnit), ZeroPeak);
    }
    SECTION("origin missing") {
        const AfGrid g = constant_grid({-1, 1}, {-1, 0, 1}, 1.0);
        CHECK_THROWS_AS(pslr(g, kUnit), std::invalid_argument);
    }
    SECTION("bad region") {
        const AfGrid g = constant_grid({-1, 0, 1}, {-1, 0, 1}, 1.0);
        CHECK_THROWS_AS(pslr(g, {0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(islr(g, {1.0, -1.0}), std::invalid_argument);
    }
}

TEST_CASE("ISLR of synthetic grids") {
    SECTION("equal main and sidelobe energy gives 0 dB") {
        // trapezoid over [-1, 1] x [-2, 2] is twice the [-1, 1]^2 mainlobe
        const AfGrid g = constant_grid(symmetric_axis(1.0, 2, 1.0), symmetric_axis(1.0, 2, 2.0), 1.0);
        const IslrResult r = islr_detail(g, kUnit);
        CHECK_THAT(r.mainlobe_energy, WithinRel(4.0, 1e-12));
        CHECK_THAT(r.total_energy, WithinRel(8.0, 1e-12));
        CHECK_THAT(r.islr_db, WithinAbs(0.0, 1e-12));
    }
    SECTION("uniform grid, three sidelobe units per mainlobe unit") {
        const AfGrid g = constant_grid(symmetric_axis(1.0, 4, 2.0), symmetric_axis(1.0, 4, 2.0), Complex(0.0, 2.0));
        CHECK_THAT(islr(g, kUnit), WithinAbs(10.0 * std::log10(3.0), 1e-12));
    }
    SECTION("no energy outside the region") {
        const AfGrid g = constant_grid(symmetric_axis(1.0, 4, 1.0), symmetric_axis(1.0, 4, 1.0), 1.0);
        CHECK(islr(g, kUnit) == -std::numeric_limits<double>::infinity());
    }
    SECTION("grid must span the region") {
        const AfGrid g = constant_grid(symmetric_axis(1.0, 4, 0.5), symmetric_axis(1.0, 4, 2.0), 1.0);
        CHECK_THROWS_AS(islr(g, kUnit), std::invalid_argument);
    }
    SECTION("zero mainlobe") {
        const AfGrid g = constant_grid(symmetric_axis(1.0, 2, 2.0), symmetric_axis(1.0, 2, 2.0), 0.0);
        CHECK_THROWS_AS(islr(g, kUnit), ZeroPeak);
    }
    SECTION("non-uniform axes use trapezoid weights") {
        // |A|^2 = 1 everywhere: energies are the rectangle areas regardless of spacing
        const AfGrid g = constant_grid({-3.0, -1.0, -0.2, 0.0, 0.7, 1.0, 1.5}, {-1.0, 0.0, 0.4, 1.0, 2.5}, 1.0);
        const IslrResult r = islr_detail(g, kUnit);
        CHECK_THAT(r.mainlobe_energy, WithinRel(2.0 * 2.0, 1e-12));
        CHECK_THAT(r.total_energy, WithinRel(4.5 * 3.5, 1e-12));
    }
}

namespace {

AfGrid random_af(std::size_t n, std::size_t m, int spu, std::uint64_t seed, int order = 4) {
    const GridConfig cfg = GridConfig::make(n, m);
    const TfSymbolGrid big_x = dd_to_tf(draw_iid(make_qam(order), n, m, seed), cfg);
    return af_grid(big_x, cfg, default_axes(cfg, spu, spu, 10.0));
}

}  // namespace

TEST_CASE("metrics on real AF grids") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const AfGrid g = random_af(4, 4, 8, seed);
        const SidelobeReport rep = sidelobe_report(g, kUnit);
        CHECK(rep.pslr_db <= 0.0);
        CHECK(rep.total_energy >= rep.mainlobe_energy);
        CHECK(rep.mainlobe_energy >= 0.0);
        CHECK((std::abs(rep.peak_location.tau) >= 1.0 || std::abs(rep.peak_location.fd) >= 1.0));

        const IslrResult d = islr_detail(g, kUnit);
        CHECK(d.doppler_edge_energy >= 0.0);
        CHECK(d.doppler_edge_energy < 1e-2 * d.total_energy);

        // scaling by a complex constant changes neither metric
        AfGrid scaled = g;
        const Complex k = std::polar(3.7, 1.1);
        for (auto& v : scaled.values) v *= k;
        CHECK_THAT(pslr(scaled, kUnit).pslr_db, WithinAbs(rep.pslr_db, 1e-12));
        CHECK_THAT(islr(scaled, kUnit), WithinAbs(rep.islr_db, 1e-12));
    }
}

TEST_CASE("ISLR converges under grid refinement") {
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const double s8 = islr(random_af(4, 4, 8, seed), kUnit);
        const double s16 = islr(random_af(4, 4, 16, seed), kUnit);
        const double s32 = islr(random_af(4, 4, 32, seed), kUnit);
        INFO("seed " << seed << ": 8 -> " << s8 << ", 16 -> " << s16 << ", 32 -> " << s32);
        // the surface has kinks at |tau| = kT, so refinement is not monotone; it is small
        CHECK(std::abs(s16 - s32) < 0.05);
        CHECK(std::abs(s8 - s32) < 0.05);
    }
}
