#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "concentra/grid.hpp"

using namespace concentra;
using std::numbers::pi;

namespace {

GridSet unit_disc(double h, double cx = 0.0, double cy = 0.0, double R = 1.0) {
    return rasterize(h, cx - R, cy - R, cx + R, cy + R, [&](double x, double y) {
        const double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= R * R;
    });
}

GridSet random_grid(std::mt19937& rng, int nx, int ny, double h, double ox, double oy,
                    double fill) {
    GridSet g(h, ox, oy, nx, ny);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int iy = 1; iy < ny - 1; ++iy)
        for (int ix = 1; ix < nx - 1; ++ix)
            if (u(rng) < fill) g.set(ix, iy, true);
    return g;
}

}  // namespace

TEST_CASE("cell counting area", "[grid]") {
    GridSet g(0.5, 0.0, 0.0, 8, 8);
    CHECK(area(g) == 0.0);
    g.set(2, 2, true);
    g.set(3, 2, true);
    CHECK(area(g) == Catch::Approx(2 * 0.25));
    CHECK(g.occupied_count() == 2);
}

TEST_CASE("unit disc area converges at the boundary-band rate", "[grid]") {
    const double h = 0.005;
    GridSet d = unit_disc(h);
    CHECK(std::abs(area(d) - pi) <= 3.0 * h * 2.0 * pi);
}

TEST_CASE("sym-diff of offset discs matches the lens complement", "[grid]") {
    const double h = 0.005, sep = 0.5;
    GridSet a = unit_disc(h, 0.0, 0.0);
    GridSet b = unit_disc(h, sep, 0.0);
    // closed-form: |A delta B| = 2*(pi - overlap), overlap the two-circle lens
    const double overlap = 2.0 * std::acos(sep / 2.0) - (sep / 2.0) * std::sqrt(4.0 - sep * sep);
    const double expect = 2.0 * (pi - overlap);
    CHECK(sym_diff_area(a, b) == Catch::Approx(expect).epsilon(0.02));
}

TEST_CASE("sym-diff is a metric on aligned grids", "[grid]") {
    const unsigned seed = std::random_device{}();
    CAPTURE(seed);
    std::mt19937 rng(seed);
    for (int trial = 0; trial < 25; ++trial) {
        GridSet a = random_grid(rng, 12, 10, 0.25, 0.0, 0.0, 0.4);
        GridSet b = random_grid(rng, 12, 10, 0.25, 0.5, -0.75, 0.4);
        GridSet c = random_grid(rng, 16, 9, 0.25, -1.0, 0.25, 0.4);
        CHECK(sym_diff_area(a, a) == 0.0);
        CHECK(sym_diff_area(a, b) == sym_diff_area(b, a));
        CHECK(sym_diff_area(a, c) <= sym_diff_area(a, b) + sym_diff_area(b, c) + 1e-12);
    }
}

TEST_CASE("incompatible grids are rejected", "[grid]") {
    GridSet a(0.25, 0.0, 0.0, 4, 4);
    GridSet b(0.5, 0.0, 0.0, 4, 4);
    CHECK_THROWS_AS(sym_diff_area(a, b), SpacingMismatchError);
    GridSet c = GridSet::from_raw(0.25, 0.1, 0.0, 4, 4);  // off-lattice origin
    CHECK_THROWS_AS(sym_diff_area(a, c), MisalignedOriginsError);
}

TEST_CASE("ball overlap equals the exhaustive cell count", "[grid]") {
    const unsigned seed = std::random_device{}();
    CAPTURE(seed);
    std::mt19937 rng(seed);
    const double h = 0.02;
    GridSet d = unit_disc(h);
    std::uniform_real_distribution<double> off(-1.2, 1.2), rad(0.1, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const BallSpec ball{{off(rng), off(rng)}, rad(rng)};
        long long direct = 0;
        for (int iy = 0; iy < d.ny(); ++iy)
            for (int ix = 0; ix < d.nx(); ++ix) {
                const double dx = d.cell_x(ix) - ball.center.x;
                const double dy = d.cell_y(iy) - ball.center.y;
                if (d.at(ix, iy) && dx * dx + dy * dy <= ball.radius * ball.radius) ++direct;
            }
        CAPTURE(trial, ball.center.x, ball.center.y, ball.radius);
        CHECK(ball_overlap_area(d, ball) == static_cast<double>(direct) * h * h);
    }
}

TEST_CASE("concentric ball overlap approximates the smaller disc", "[grid]") {
    const double h = 0.005;
    GridSet d = unit_disc(h);
    CHECK(ball_overlap_area(d, {{0.0, 0.0}, 0.5}) ==
          Catch::Approx(pi * 0.25).margin(3.0 * h * pi));
    CHECK(ball_overlap_area(d, {{0.0, 0.0}, 2.0}) == Catch::Approx(area(d)));
}

TEST_CASE("centroid of a disc sits at its center", "[grid]") {
    GridSet d = unit_disc(0.01, 0.3, -0.7);
    const Point2 c = centroid(d);
    CHECK(std::abs(c.x - 0.3) <= 0.01);
    CHECK(std::abs(c.y + 0.7) <= 0.01);
    GridSet e(0.01, 0.0, 0.0, 4, 4);
    CHECK_THROWS_AS(centroid(e), EmptySetError);
}

TEST_CASE("resample preserves area and refines the lattice", "[grid]") {
    const double h = 0.01;
    GridSet d = unit_disc(h);
    for (int k : {2, 3}) {
        GridSet r = resample(d, k);
        CHECK(r.h() == Catch::Approx(h / k));
        CHECK(area(r) == Catch::Approx(area(d)));
    }
    // refined occupancy stays within a boundary band of the finer rasterization
    GridSet r2 = resample(d, 2);
    GridSet fine = unit_disc(h / 2.0);
    CHECK(sym_diff_area(r2, fine) <= 2.0 * 2.0 * pi * h);
}

TEST_CASE("grid container round-trips byte-identically", "[grid]") {
    GridSet d = unit_disc(0.05);
    std::ostringstream first;
    write_gset(d, first);
    std::istringstream back(first.str());
    GridSet d2 = read_gset(back);
    std::ostringstream second;
    write_gset(d2, second);
    CHECK(first.str() == second.str());
    CHECK(cellwise_equal(d, d2));
    CHECK(d2.h() == d.h());
}

TEST_CASE("grid container rejects malformed input", "[grid]") {
    GridSet d = unit_disc(0.1);
    std::ostringstream os;
    write_gset(d, os);
    const std::string good = os.str();

    {
        std::istringstream bad(std::string("GSET2\n") + good.substr(6));
        CHECK_THROWS_AS(read_gset(bad), FormatError);
    }
    {
        std::istringstream truncated(good.substr(0, good.size() - 5));
        CHECK_THROWS_AS(read_gset(truncated), FormatError);
    }
    {
        std::istringstream trailing(good + "x");
        CHECK_THROWS_AS(read_gset(trailing), FormatError);
    }
    {
        // oversized dims against a short payload
        std::istringstream bad("GSET1\nh=0.1\norigin=0 0\ndims=100 100\nabc");
        CHECK_THROWS_AS(read_gset(bad), FormatError);
    }
    {
        std::istringstream bad("GSET1\nh=-1\norigin=0 0\ndims=2 2\n\0\0\0\0");
        CHECK_THROWS_AS(read_gset(bad), FormatError);
    }
}

TEST_CASE("padded and trimmed are inverse-ish", "[grid]") {
    GridSet d = unit_disc(0.05);
    GridSet p = d.padded(4);
    CHECK(p.nx() == d.nx() + 8);
    CHECK(cellwise_equal(p, d));
    GridSet t = p.trimmed();
    CHECK(cellwise_equal(t, d));
    CHECK(t.nx() <= d.nx());
}

TEST_CASE("cellwise subset respects lattice offsets", "[grid]") {
    GridSet small = unit_disc(0.02, 0.0, 0.0, 0.5);
    GridSet big = unit_disc(0.02, 0.0, 0.0, 1.0);
    CHECK(cellwise_subset(small, big));
    CHECK_FALSE(cellwise_subset(big, small));
}
