#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chemoflow/diagnostics.hpp"
#include "chemoflow/operators.hpp"

using namespace chemoflow;

namespace {

struct Setup {
    ModelSpec spec;
    EnergyCoefficients coeffs;
    TruncationTable table;

    Setup() : spec(), coeffs(make_coefficients(spec)), table(build_truncations(spec, coeffs.s0)) {}
};

DiagnosticsRecord at(double t, double f, double c6 = 0.0)
{
    DiagnosticsRecord r;
    r.t = t;
    r.F = f;
    r.G = f;
    r.I_c6 = c6;
    return r;
}

// Composite Simpson oracle on [0,1].
double simpson01(const std::function<double(double)>& f, int panels = 200000)
{
    const double h = 1.0 / panels;
    double s = f(0.0) + f(1.0);
    for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("delta constant")
{
    CHECK(EnergyCoefficients::kDelta == doctest::Approx(0.024306).epsilon(1e-4));
    CHECK(EnergyCoefficients::kDelta == doctest::Approx(1.0 / std::pow(5.0 + std::sqrt(2.0), 2)).epsilon(1e-15));
}

TEST_CASE("homogeneous state above 2 s0")
{
    Setup s;
    REQUIRE(s.coeffs.s0 == doctest::Approx(1.0));
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    State st(g);
    st.n = ScalarField(g, 3.0);
    st.c = ScalarField(g, 0.8);
    const DiagnosticsRecord r = record(st, s.spec, s.coeffs, s.table);
    const double d2 = 27.0 / 6.0 + s.spec.epsilon * 9.0 / 2.0;
    CHECK(r.F == doctest::Approx(d2).epsilon(1e-13));
    CHECK(r.G == doctest::Approx(d2).epsilon(1e-13));
    CHECK(r.I_c4 == 0.0);
    CHECK(r.I_c6 == 0.0);
    CHECK(r.I_mix == 0.0);
    CHECK(r.mass_n == doctest::Approx(3.0));
    CHECK(r.E_u == 0.0);
}

TEST_CASE("zero density")
{
    Setup s;
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    State st(g);
    st.c = sample(g, [](double x, double y) { return 1.0 + 0.3 * std::cos(std::numbers::pi * x) * y * y; });
    const DiagnosticsRecord r = record(st, s.spec, s.coeffs, s.table);
    CHECK(r.mass_n == 0.0);
    CHECK(r.I_logn == 0.0);
    CHECK(r.F == doctest::Approx(s.coeffs.b2 * r.I_c4 + s.coeffs.b3 * s.table.psi2(0.0)).epsilon(1e-14));
}

TEST_CASE("I_c4 for an injected exponential signal")
{
    // |grad c|^4 / c^3 = e^x exactly. The field violates the no-flux condition,
    // so the wall faces (gradient forced to 0) cost a first-order error.
    Setup s;
    auto err = [&](int n) {
        const Grid g = make_grid(n, n, 1.0, 1.0);
        State st(g);
        st.c = sample(g, [](double x, double) { return std::exp(x); });
        return std::abs(record(st, s.spec, s.coeffs, s.table).I_c4 - (std::numbers::e - 1.0));
    };
    const double e64 = err(64), e128 = err(128), e256 = err(256);
    CHECK(e256 < 2e-2);
    CHECK(e64 / e128 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(e128 / e256 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("I_c4 is second order on a no-flux signal")
{
    Setup s;
    const double pi = std::numbers::pi;
    const double exact = simpson01([&](double x) {
        const double d = pi * std::sin(pi * x);
        return d * d * d * d / std::pow(2.0 + std::cos(pi * x), 3);
    });
    auto err = [&](int n) {
        const Grid g = make_grid(n, n, 1.0, 1.0);
        State st(g);
        st.c = sample(g, [&](double x, double) { return 2.0 + std::cos(pi * x); });
        return std::abs(record(st, s.spec, s.coeffs, s.table).I_c4 - exact);
    };
    const double ratio1 = err(32) / err(64);
    const double ratio2 = err(64) / err(128);
    CHECK(ratio1 == doctest::Approx(4.0).epsilon(0.1));
    CHECK(ratio2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("F and G agree with a brute-force recomputation")
{
    Setup s;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Grid g = make_grid(12, 10, 1.0, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
        State st(g);
        for (auto& v : st.n.values) v = 4.0 * u(rng);
        for (auto& v : st.c.values) v = 0.2 + u(rng);
        const DiagnosticsRecord r = record(st, s.spec, s.coeffs, s.table);

        // Independent path: raw loops over cells, each cell's own four faces.
        const double hx = g.hx(), hy = g.hy(), eps = s.spec.epsilon;
        double d2 = 0.0, nc = 0.0, c4 = 0.0, psi = 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                auto cv = [&](int a, int b) { return st.c.values[static_cast<std::size_t>(b) * g.nx() + a]; };
                const double cc = cv(i, j);
                const double gl = i > 0 ? (cc - cv(i - 1, j)) / hx : 0.0;
                const double gr = i < g.nx() - 1 ? (cv(i + 1, j) - cc) / hx : 0.0;
                const double gb = j > 0 ? (cc - cv(i, j - 1)) / hy : 0.0;
                const double gt = j < g.ny() - 1 ? (cv(i, j + 1) - cc) / hy : 0.0;
                const double q = 0.5 * (gl * gl + gr * gr + gb * gb + gt * gt);
                const double nn = st.n.values[static_cast<std::size_t>(j) * g.nx() + i];
                d2 += nn * nn * nn / 6.0 + eps * nn * nn / 2.0;
                nc += nn * q / cc;
                c4 += q * q / (cc * cc * cc);
                psi += s.table.psi2(nn);
            }
        const double area = hx * hy;
        const double F = area * (d2 + s.coeffs.b1 * nc + s.coeffs.b2 * c4 + s.coeffs.b3 * psi);
        const double G = area * (d2 + s.coeffs.bhat2 * c4 + s.coeffs.bhat3 * psi);
        CHECK(r.F == doctest::Approx(F).epsilon(1e-12));
        CHECK(r.G == doctest::Approx(G).epsilon(1e-12));
    }
}

TEST_CASE("velocity integrals")
{
    Setup s;
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid g = make_grid(9, 7, 1.0, 1.0);
    State st(g);
    st.n = ScalarField(g, 1.0);
    for (auto& v : st.u.ux) v = u(rng);
    for (auto& v : st.u.uy) v = u(rng);
    st.u.zero_normal_boundary();
    const DiagnosticsRecord r = record(st, s.spec, s.coeffs, s.table);
    CHECK(r.E_u == doctest::Approx(face_inner(st.u, st.u)).epsilon(1e-14));
    CHECK(r.enstrophy == doctest::Approx(-face_inner(st.u, laplace_velocity(st.u))).epsilon(1e-12));
    CHECK(r.enstrophy > 0.0);
}

TEST_CASE("record entries are non-negative")
{
    Setup s;
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        State st(g);
        for (auto& v : st.n.values) v = 10.0 * u(rng) * u(rng);
        for (auto& v : st.c.values) v = 1e-3 + u(rng);
        const DiagnosticsRecord r = record(st, s.spec, s.coeffs, s.table, 0.0);
        for (const auto& col : record_columns()) CHECK(r.*col.field >= 0.0);
        CHECK(std::isfinite(r.F));
    }
}

TEST_CASE("select_functional")
{
    ModelSpec s;
    s.gamma = 0.3;
    CHECK(select_functional(s, 100.0) == Functional::F);
    s.gamma = 0.8;
    CHECK(select_functional(s, 1.0) == Functional::G);
    CHECK_THROWS_WITH_AS(select_functional(s, 2.0), doctest::Contains("||n0||_{L1} <= M"), std::invalid_argument);
    s.gamma = 0.9;
    CHECK_THROWS_WITH_AS(select_functional(s, 1.0), doctest::Contains("gamma in [0,5/6]"), std::invalid_argument);
}

TEST_CASE("envelope: constant series")
{
    std::vector<DiagnosticsRecord> series;
    for (int k = 0; k <= 100; ++k) series.push_back(at(0.1 * k, 2.0));
    EnergyCoefficients c;
    c.mu = 0.5;
    c.Gamma = 1.0;  // = mu F0
    const EnvelopeReport rep = functional_envelope(series, c);
    CHECK(rep.given_fraction == 1.0);
    CHECK(rep.given_envelope_ok);
    CHECK(rep.satisfied());
    CHECK(rep.bound == doctest::Approx(2.0));
    for (double gamma : {1.0, 2.0, 50.0}) {
        for (double v : envelope_residuals(series, Functional::F, 0.5, gamma)) CHECK(v <= 0.0);
    }
    CHECK_THROWS_AS(functional_envelope({}, c), std::invalid_argument);
}

TEST_CASE("envelope: exponential decay")
{
    std::vector<DiagnosticsRecord> series;
    for (int k = 0; k <= 1000; ++k) series.push_back(at(0.01 * k, 3.0 * std::exp(-0.01 * k)));
    const EnvelopeReport rep = functional_envelope(series, EnergyCoefficients{});
    CHECK(rep.satisfied());
    CHECK(rep.mu >= 1.0);
    CHECK(rep.bound == doctest::Approx(3.0));
}

TEST_CASE("envelope: linear growth on a long horizon")
{
    std::vector<DiagnosticsRecord> series;
    for (int k = 0; k <= 1000; ++k) {
        const double t = 1e7 * k;
        series.push_back(at(t, 1.0 + t));
    }
    const EnvelopeReport rep = functional_envelope(series, EnergyCoefficients{});
    CHECK_FALSE(rep.satisfied());
    CHECK_FALSE(rep.given_envelope_ok);
    // Every grid pair's envelope is exceeded.
    for (int k = 0; k < 20; ++k)
        for (int l = 0; l < 20; ++l) {
            const double mu = std::pow(10.0, (k - 10) / 5.0);
            const double gamma = std::pow(10.0, (l - 8) / 2.0);
            CHECK(series.back().F > std::max(1.0, gamma / mu));
        }
}

TEST_CASE("window averages and running max growth")
{
    std::vector<DiagnosticsRecord> series;
    for (int k = 0; k <= 300; ++k) {
        DiagnosticsRecord r;
        r.t = 0.01 * k;
        r.I_cq = 2.0;
        r.I_Dlog = r.t;
        series.push_back(r);
    }
    const auto flat = window_averages(series, &DiagnosticsRecord::I_cq);
    REQUIRE(flat.size() == 201);
    for (const auto& [t, v] : flat) CHECK(v == doctest::Approx(2.0));
    const auto ramp = window_averages(series, &DiagnosticsRecord::I_Dlog);
    for (const auto& [t, v] : ramp) CHECK(v == doctest::Approx(t + 0.5));
    CHECK(running_max_growth(flat, 1.0) == 0.0);
    CHECK(running_max_growth(ramp, 1.0) == doctest::Approx((2.5 - 1.5) / 1.5));
}
