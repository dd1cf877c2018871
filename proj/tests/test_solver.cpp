#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chemoflow/operators.hpp"
#include "chemoflow/solver.hpp"

using namespace chemoflow;

namespace {

constexpr double kPi = std::numbers::pi;

State bump_state(const Grid& g, double peak_at_x = 0.5)
{
    State s(g);
    s.c = sample(g, [](double x, double y) { return 1.0 + 0.5 * std::cos(kPi * x) * std::cos(kPi * y); });
    s.n = sample(g, [&](double x, double y) {
        const double r2 = (x - peak_at_x) * (x - peak_at_x) + (y - 0.4) * (y - 0.4);
        return std::exp(-r2 / 0.02);
    });
    const double m = integrate(s.n);
    for (auto& v : s.n.values) v /= m;
    return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace

TEST_CASE("zero density and velocity with constant signal is a fixed point")
{
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const PoissonSolver ps(g);
    State s(g);
    s.c = ScalarField(g, 0.7);
    TimeControls tc;
    const State next = step(s, ModelSpec{}, tc, ps);
    CHECK(next.t == doctest::Approx(tc.dt_max));
    CHECK(max_abs_diff(next.n.values, s.n.values) == 0.0);
    CHECK(max_abs_diff(next.c.values, s.c.values) <= 1e-15);
    CHECK(next.u.max_abs() == 0.0);
}

TEST_CASE("homogeneous state matches the uniform reduction")
{
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    const PoissonSolver ps(g);
    State s(g);
    const double nbar = 1.3;
    const double c0 = 0.9;
    s.n = ScalarField(g, nbar);
    s.c = ScalarField(g, c0);
    TimeControls tc;
    tc.dt_max = 0.01;
    tc.t_end = 1.0;
    tc.cadence = 0.1;
    const RunResult r = run(s, ModelSpec{}, tc, ps);
    CHECK(r.final_state.t == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_abs_diff(r.final_state.n.values, s.n.values) <= 1e-12);
    CHECK(r.final_state.u.max_abs() <= 1e-10);
    const double product = c0 * std::pow(1.0 + tc.dt_max * nbar, -static_cast<double>(r.monitors.steps));
    const double exact = c0 * std::exp(-nbar);
    for (double v : r.final_state.c.values) {
        CHECK(v == doctest::Approx(product).epsilon(1e-12));
        CHECK(std::abs(v - exact) / exact <= 5.0 * tc.dt_max);
    }
}

TEST_CASE("one step conserves mass")
{
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    const PoissonSolver ps(g);
    const State s = bump_state(g);
    StepInfo info;
    const State next = step(s, ModelSpec{}, TimeControls{}, ps, &info);
    CHECK(std::abs(integrate(next.n) - integrate(s.n)) <= 1e-13 * integrate(s.n));
    CHECK(info.substeps > 1);
    CHECK(info.clamp_mass == 0.0);
    CHECK(next.n.min() >= 0.0);
    CHECK(next.c.max() <= s.c.max());
}

TEST_CASE("t_end = 0 returns the initial state")
{
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const PoissonSolver ps(g);
    const State s = bump_state(g);
    TimeControls tc;
    tc.t_end = 0.0;
    int calls = 0;
    const RunResult r = run(s, ModelSpec{}, tc, ps, {[&](const State&, const RunMonitors&) { ++calls; }});
    CHECK(calls == 1);
    CHECK(r.final_state.t == 0.0);
    CHECK(r.final_state.n.values == s.n.values);
    CHECK(r.final_state.c.values == s.c.values);
    CHECK(r.monitors.steps == 0);
}

TEST_CASE("sinks fire on the cadence and at t_end")
{
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const PoissonSolver ps(g);
    TimeControls tc;
    tc.t_end = 0.25;
    tc.cadence = 0.1;
    tc.dt_max = 0.03;
    std::vector<double> times;
    run(bump_state(g), ModelSpec{}, tc, ps, {[&](const State& s, const RunMonitors&) { times.push_back(s.t); }});
    REQUIRE(times.size() == 4);
    CHECK(times[0] == 0.0);
    CHECK(times[1] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(times[2] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(times[3] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("pure diffusion relaxes to the mean")
{
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    const PoissonSolver ps(g);
    ModelSpec spec;
    spec.s0_sensitivity = 0.0;
    spec.phi_gradient = {0.0, 0.0};
    State s = bump_state(g);
    const double nbar = integrate(s.n);
    TimeControls tc;
    tc.cadence = 0.05;
    tc.t_end = 0.5;
    std::vector<double> dev;
    run(s, spec, tc, ps, {[&](const State& st, const RunMonitors&) {
        double m = 0.0;
        for (double v : st.n.values) m = std::max(m, std::abs(v - nbar));
        dev.push_back(m);
    }});
    for (std::size_t k = 1; k < dev.size(); ++k) CHECK(dev[k] < dev[k - 1]);
    CHECK(dev.back() < 1e-2 * dev.front());
}

TEST_CASE("pure diffusion agrees with a fine-grid reference")
{
    ModelSpec spec;
    spec.s0_sensitivity = 0.0;
    spec.phi_gradient = {0.0, 0.0};
    TimeControls tc;
    tc.t_end = 0.05;
    tc.dt_max = 1e-3;
    auto final_n = [&](int n) {
        const Grid g = make_grid(n, n, 1.0, 1.0);
        const PoissonSolver ps(g);
        return run(bump_state(g), spec, tc, ps).final_state.n;
    };
    const ScalarField coarse = final_n(16);
    const ScalarField fine = final_n(32);
    const ScalarField finest = final_n(64);
    auto err = [](const ScalarField& c, const ScalarField& f) {
        // Restrict f to c by 2x2 averaging.
        double e = 0.0;
        for (int j = 0; j < c.grid.ny(); ++j)
            for (int i = 0; i < c.grid.nx(); ++i) {
                const double avg =
                    0.25 * (f(2 * i, 2 * j) + f(2 * i + 1, 2 * j) + f(2 * i, 2 * j + 1) + f(2 * i + 1, 2 * j + 1));
                e = std::max(e, std::abs(c(i, j) - avg));
            }
        return e;
    };
    CHECK(err(fine, finest) < err(coarse, fine));
}

TEST_CASE("buoyancy drives flow only for non-constant density")
{
    const Grid g = make_grid(24, 24, 1.0, 1.0);
    const PoissonSolver ps(g);
    TimeControls tc;
    tc.t_end = 0.05;
    State flat(g);
    flat.n = ScalarField(g, 1.0);
    const RunResult a = run(flat, ModelSpec{}, tc, ps);
    CHECK(face_inner(a.final_state.u, a.final_state.u) <= 1e-24);

    const RunResult b = run(bump_state(g, 0.3), ModelSpec{}, tc, ps);
    CHECK(face_inner(b.final_state.u, b.final_state.u) > 1e-10);
    CHECK(b.monitors.max_div <= 1e-8);
}

TEST_CASE("run monitors hold on a chemotactic bump")
{
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    const PoissonSolver ps(g);
    TimeControls tc;
    tc.t_end = 0.3;
    ModelSpec spec;
    spec.s0_sensitivity = 3.0;
    spec.sensitivity_kind = SensitivityKind::Rotation;
    spec.theta = 0.4;
    const RunResult r = run(bump_state(g, 0.3), spec, tc, ps);
    CHECK(r.monitors.mass_ok());
    CHECK(r.monitors.c_max_ok());
    CHECK(r.monitors.c_lower_ok());
    CHECK(r.monitors.div_ok());
    CHECK(r.monitors.clamp_ok());
    CHECK(r.final_state.n.min() >= 0.0);
}

TEST_CASE("explicit diffusion modes")
{
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const PoissonSolver ps(g);
    TimeControls tc;
    tc.t_end = 0.02;
    tc.c_diffusion = DiffusionMode::Explicit;
    tc.u_diffusion = DiffusionMode::Explicit;
    const State s = bump_state(g, 0.3);
    CHECK(stable_dt(s, tc) <= tc.cfl / (4.0 / (g.hx() * g.hx())));
    const RunResult r = run(s, ModelSpec{}, tc, ps);
    CHECK(r.monitors.all_ok());

    TimeControls implicit = tc;
    implicit.c_diffusion = DiffusionMode::SemiImplicit;
    implicit.u_diffusion = DiffusionMode::SemiImplicit;
    implicit.dt_max = stable_dt(s, tc);
    const RunResult q = run(s, ModelSpec{}, implicit, ps);
    CHECK(max_abs_diff(r.final_state.c.values, q.final_state.c.values) < 5e-3);
}

TEST_CASE("deterministic replay")
{
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const PoissonSolver ps(g);
    TimeControls tc;
    tc.t_end = 0.1;
    const RunResult a = run(bump_state(g, 0.3), ModelSpec{}, tc, ps);
    const RunResult b = run(bump_state(g, 0.3), ModelSpec{}, tc, ps);
    CHECK(a.final_state.n.values == b.final_state.n.values);
    CHECK(a.final_state.c.values == b.final_state.c.values);
    CHECK(a.final_state.u.ux == b.final_state.u.ux);
    CHECK(a.final_state.u.uy == b.final_state.u.uy);
}

TEST_CASE("inadmissible initial data and controls are rejected")
{
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    const PoissonSolver ps(g);
    State s(g);
    CHECK_THROWS_WITH_AS(run(s, ModelSpec{}, TimeControls{}, ps), doctest::Contains("not identically 0"),
                         std::invalid_argument);
    s.n = ScalarField(g, 1.0);
    s.n(2, 2) = -0.1;
    CHECK_THROWS_AS(run(s, ModelSpec{}, TimeControls{}, ps), std::invalid_argument);
    s.n(2, 2) = 1.0;
    s.c(3, 3) = 0.0;
    CHECK_THROWS_WITH_AS(run(s, ModelSpec{}, TimeControls{}, ps), doctest::Contains("c0 > 0"), std::invalid_argument);
    s.c(3, 3) = 1.0;
    s.u.x(3, 3) = 1.0;
    CHECK_THROWS_WITH_AS(run(s, ModelSpec{}, TimeControls{}, ps), doctest::Contains("solenoidal"),
                         std::invalid_argument);
    s.u.x(3, 3) = 0.0;
    TimeControls bad;
    bad.cfl = 1.5;
    CHECK_THROWS_AS(run(s, ModelSpec{}, bad, ps), std::invalid_argument);
}

TEST_CASE("collapsing step size is reported")
{
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    const PoissonSolver ps(g);
    State s(g);
    s.n = ScalarField(g, 1.0);
    TimeControls tc;
    tc.dt_min = 1.0;
    CHECK_THROWS_AS(step(s, ModelSpec{}, tc, ps), StabilityError);
}
