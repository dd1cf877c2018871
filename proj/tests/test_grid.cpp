#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "chemoflow/grid.hpp"

using namespace chemoflow;

TEST_CASE("make_grid spacings")
{
    const Grid a = make_grid(4, 4, 1.0, 1.0);
    CHECK(a.hx() == 0.25);
    CHECK(a.hy() == 0.25);

    const Grid b = make_grid(64, 32, 2.0, 1.0);
    CHECK(b.hx() == 0.03125);
    CHECK(b.hy() == 0.03125);
}

TEST_CASE("make_grid rejects bad arguments")
{
    CHECK_THROWS_WITH_AS(make_grid(2, 4, 1.0, 1.0), doctest::Contains("grid too small"), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 3, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 4, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 4, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 4, std::numeric_limits<double>::infinity(), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 4, 1.0, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("staggered positions")
{
    const Grid g = make_grid(8, 4, 2.0, 1.0);
    CHECK(g.xc(0) == doctest::Approx(0.125));
    CHECK(g.yc(3) == doctest::Approx(0.875));
    CHECK(g.xn(8) == doctest::Approx(2.0));
    CHECK(g.yn(0) == 0.0);
}

TEST_CASE("index maps are bijections")
{
    for (int nx = 4; nx <= 16; ++nx)
        for (int ny = 4; ny <= 16; ++ny) {
            const Grid g = make_grid(nx, ny, 1.0, 1.0);
            std::set<std::size_t> cells, xf, yf;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) cells.insert(g.cell(i, j));
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i <= nx; ++i) xf.insert(g.xface(i, j));
            for (int j = 0; j <= ny; ++j)
                for (int i = 0; i < nx; ++i) yf.insert(g.yface(i, j));
            REQUIRE(cells.size() == g.cell_count());
            REQUIRE(*cells.rbegin() == g.cell_count() - 1);
            REQUIRE(xf.size() == g.xface_count());
            REQUIRE(*xf.rbegin() == g.xface_count() - 1);
            REQUIRE(yf.size() == g.yface_count());
            REQUIRE(*yf.rbegin() == g.yface_count() - 1);
        }
}

TEST_CASE("mirror ghosts")
{
    const Grid g = make_grid(4, 5, 1.0, 1.0);
    CHECK(g.reflect_x(-1) == 0);
    CHECK(g.reflect_x(-2) == 1);
    CHECK(g.reflect_x(4) == 3);
    CHECK(g.reflect_x(5) == 2);
    CHECK(g.reflect_y(-3) == 2);
    CHECK(g.reflect_y(6) == 3);
    for (int i = -12; i < 16; ++i) {
        const int r = g.reflect_x(i);
        CHECK(r >= 0);
        CHECK(r < 4);
    }
}

TEST_CASE("integrate examples")
{
    const Grid g = make_grid(4, 4, 1.0, 1.0);
    CHECK(integrate(ScalarField(g, 2.0)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(integrate(ScalarField(g, 0.0)) == 0.0);

    const Grid fine = make_grid(128, 128, 1.0, 1.0);
    const ScalarField x = sample(fine, [](double xx, double) { return xx; });
    CHECK(std::abs(integrate(x) - 0.5) <= 1e-12);
}

TEST_CASE("integrate is linear and positive")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid g = make_grid(12, 9, 1.5, 0.7);
    for (int trial = 0; trial < 50; ++trial) {
        ScalarField f(g), h(g), comb(g), pos(g);
        const double a = u(rng) * 3.0;
        const double b = u(rng) * 3.0;
        for (std::size_t k = 0; k < g.cell_count(); ++k) {
            f.values[k] = u(rng);
            h.values[k] = u(rng);
            comb.values[k] = a * f.values[k] + b * h.values[k];
            pos.values[k] = std::abs(f.values[k]);
        }
        CHECK(integrate(comb) == doctest::Approx(a * integrate(f) + b * integrate(h)).epsilon(1e-12));
        CHECK(integrate(pos) >= 0.0);
    }
}

TEST_CASE("vector field boundary handling")
{
    const Grid g = make_grid(4, 4, 1.0, 1.0);
    VectorField v(g);
    for (auto& x : v.ux) x = 1.0;
    for (auto& y : v.uy) y = -2.0;
    v.zero_normal_boundary();
    for (int j = 0; j < 4; ++j) {
        CHECK(v.x(0, j) == 0.0);
        CHECK(v.x(4, j) == 0.0);
        CHECK(v.x(2, j) == 1.0);
    }
    for (int i = 0; i < 4; ++i) {
        CHECK(v.y(i, 0) == 0.0);
        CHECK(v.y(i, 4) == 0.0);
    }
    CHECK(v.max_abs() == 2.0);
    CHECK(v.all_finite());
}
