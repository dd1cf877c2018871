#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "chemoflow/io.hpp"

using namespace chemoflow;

TEST_CASE("timeseries header")
{
    CHECK(timeseries_header() ==
          "t,mass_n,c_max,c_min,n_max,div_u_max,E_u,enstrophy,I_logn,I_D2grad,I_Dlog,I_c4,I_c6,I_mix,I_cq,F,G,"
          "clamp_mass");
    CHECK(format_timeseries({}) == timeseries_header() + "\n");
    CHECK(parse_timeseries(format_timeseries({})).empty());
}

TEST_CASE("homogeneous record row")
{
    const Grid g = make_grid(8, 8, 2.0, 1.0);
    State s(g);
    s.n = ScalarField(g, 1.5);
    s.c = ScalarField(g, 0.5);
    const ModelSpec spec;
    const EnergyCoefficients coeffs = make_coefficients(spec);
    const DiagnosticsRecord r = record(s, spec, coeffs, build_truncations(spec, coeffs.s0));
    const auto rows = parse_timeseries(format_timeseries({r}));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].I_c4 == 0.0);
    CHECK(rows[0].mass_n == doctest::Approx(1.5 * 2.0).epsilon(1e-15));
}

TEST_CASE("timeseries round-trip is exact")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> e(-300.0, 300.0);
    std::vector<DiagnosticsRecord> recs(50);
    for (auto& r : recs)
        for (const auto& col : record_columns()) r.*col.field = std::pow(10.0, e(rng)) * (e(rng) < 0 ? -1.0 : 1.0);
    recs[0].t = std::numeric_limits<double>::denorm_min();
    recs[1].F = 0.1 + 0.2;
    const auto back = parse_timeseries(format_timeseries(recs));
    REQUIRE(back.size() == recs.size());
    for (std::size_t k = 0; k < recs.size(); ++k)
        for (const auto& col : record_columns())
            CHECK(std::bit_cast<std::uint64_t>(back[k].*col.field) == std::bit_cast<std::uint64_t>(recs[k].*col.field));
    CHECK_THROWS_AS(parse_timeseries("t,mass\n1,2\n"), std::runtime_error);
    CHECK_THROWS_WITH(parse_timeseries(timeseries_header() + "\n1,2,3\n"), doctest::Contains("line 2"));
}

TEST_CASE("snapshot of a 4x4 zero state")
{
    const State s(make_grid(4, 4, 1.0, 1.0));
    const auto bytes = encode_snapshot(s);
    // 4 magic + 3*4 header ints + 3*8 doubles + 8*(16+16+20+20) field values.
    CHECK(bytes.size() == 616);
    CHECK(snapshot_size(4, 4) == 616);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "CNS2");
    CHECK(bytes[4] == 1);
    CHECK(bytes[8] == 4);
    const State back = decode_snapshot(bytes);
    CHECK(back.n.grid == s.n.grid);
    CHECK(encode_snapshot(back) == bytes);
}

TEST_CASE("snapshot round-trip is bit-exact")
{
    const Grid g = make_grid(7, 5, 1.3, 0.9);
    State s(g);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> d;
    for (auto& v : s.n.values) v = d(rng);
    for (auto& v : s.c.values) v = d(rng);
    for (auto& v : s.u.ux) v = d(rng);
    for (auto& v : s.u.uy) v = d(rng);
    s.t = 0.1 + 0.2;
    const auto bytes = encode_snapshot(s);
    const State back = decode_snapshot(bytes);
    CHECK(back.t == s.t);
    CHECK(back.n.values == s.n.values);
    CHECK(back.c.values == s.c.values);
    CHECK(back.u.ux == s.u.ux);
    CHECK(back.u.uy == s.u.uy);
    CHECK(encode_snapshot(back) == bytes);
}

TEST_CASE("corrupted snapshots are rejected")
{
    const auto good = encode_snapshot(State(make_grid(4, 4, 1.0, 1.0)));
    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("magic"), std::runtime_error);
    bad = good;
    bad[4] = 2;
    CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("version"), std::runtime_error);
    bad = good;
    bad.pop_back();
    CHECK_THROWS_AS(decode_snapshot(bad), std::runtime_error);
    CHECK_THROWS_AS(decode_snapshot({}), std::runtime_error);
}
