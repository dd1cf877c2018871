#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chemoflow/analysis.hpp"

using namespace chemoflow;

TEST_CASE("corpus is reproducible and bounded below")
{
    const Grid g = make_grid(24, 24, 1.0, 1.0);
    const FieldCorpus a = make_corpus(g, 10, 5);
    const FieldCorpus b = make_corpus(g, 10, 5);
    REQUIRE(a.members.size() == 10);
    for (std::size_t k = 0; k < a.members.size(); ++k) {
        CHECK(a.members[k].seed == 5 + k);
        CHECK(a.members[k].phi.values == b.members[k].phi.values);
        CHECK(a.members[k].phi.min() >= 0.1 - 1e-14);
        CHECK(a.members[k].psi.values == b.members[k].psi.values);
        CHECK(a.members[k].psi.max() > a.members[k].psi.min());
    }
    CHECK(a.members[0].phi.values != a.members[1].phi.values);
}

TEST_CASE("log-Hessian identity: constant field")
{
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const LogHessianResult r = log_hessian_identity_residual(ScalarField(g, 2.5));
    CHECK(r.res_identity == 0.0);
    CHECK(r.gap_est1 == 0.0);
    CHECK(r.gap_est2 == 0.0);
}

TEST_CASE("log-Hessian identity converges at second order on e^x")
{
    std::vector<double> res;
    for (int n : {32, 64, 128}) {
        const Grid g = make_grid(n, n, 1.0, 1.0);
        res.push_back(log_hessian_identity_residual(sample(g, [](double x, double) { return std::exp(x); })).res_identity);
    }
    CHECK(std::log2(res[0] / res[1]) >= 1.8);
    CHECK(std::log2(res[1] / res[2]) >= 1.8);
    CHECK(res[2] < 1e-3);
}

TEST_CASE("log-Hessian estimates hold on a corpus")
{
    const Grid g = make_grid(40, 40, 1.0, 1.0);
    const FieldCorpus corpus = make_corpus(g, 30, 11);
    for (const auto& m : corpus.members) {
        const LogHessianResult r = log_hessian_identity_residual(m.phi);
        CHECK(r.gap_est1 >= -1e-8);
        CHECK(r.gap_est2 >= -1e-8);
    }
}

TEST_CASE("weighted Trudinger gap on constants")
{
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    const ScalarField one(g, 1.0);
    CHECK(trudinger_gap(one, ScalarField(g, 0.0), 1.0, 1.0, 0.7) == doctest::Approx(0.7));
    CHECK(trudinger_gap(one, ScalarField(g, 0.0), 2.0, 1.0, 0.7) == doctest::Approx(0.35));
    for (double K : {0.0, 0.5, 3.0}) CHECK(trudinger_gap(one, one, 1.0, 1.0, K) == doctest::Approx(2.0 * K - 1.0));
    const GapTerms t = trudinger_terms(one, one, 1.0, 1.0);
    CHECK(t.needed() == doctest::Approx(0.5));
}

TEST_CASE("super-level Trudinger gap")
{
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    const auto D = [](double s) { return s; };
    const double s0 = 1.0;
    SUBCASE("empty super-level set")
    {
        const ScalarField phi(g, 1.5);
        const GapTerms t = trudinger_sublevel_terms(phi, 1.0, s0, D, 1.0);
        CHECK(t.lhs == 0.0);
        CHECK(trudinger_sublevel_gap(phi, 1.0, s0, D, 1.0, 1.0) >= 0.0);
    }
    SUBCASE("constant above the threshold")
    {
        const double v = s0 + 2.0;
        const ScalarField phi(g, v);
        const double K = 1.3;
        const double rhs = K * v * v * v + (K - std::log(v)) * v + K;
        const double lhs = v * std::log(v + 1.0);
        CHECK(trudinger_sublevel_gap(phi, 1.0, s0, D, 1.0, K) == doctest::Approx(rhs - lhs).epsilon(1e-13));
    }
}

TEST_CASE("Poincare gap on subsets")
{
    const Grid g = make_grid(128, 128, 1.0, 1.0);
    std::vector<char> left(g.cell_count(), 0);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx() / 2; ++i) left[g.cell(i, j)] = 1;

    CHECK(poincare_subset_gap(ScalarField(g, 3.0), left, 2.0, 1.0, 0.25) == 0.0);

    const ScalarField x = sample(g, [](double x, double) { return x; });
    const GapTerms t = poincare_subset_terms(x, left, 2.0, 0.25);
    CHECK(t.lhs * t.lhs == doctest::Approx(7.0 / 48.0).epsilon(1e-3));
    CHECK(t.coef == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(poincare_subset_gap(x, left, 2.0, 1.0, 0.25) > 0.0);

    CHECK_THROWS_AS(poincare_subset_gap(x, std::vector<char>(g.cell_count(), 0), 2.0, 1.0, 0.25),
                    std::invalid_argument);
    CHECK_THROWS_AS(poincare_subset_gap(x, left, 2.0, 1.0, 0.75), std::invalid_argument);
}

TEST_CASE("ODE envelope closed form")
{
    CHECK(ode_envelope(1.0, 1.0, 1.0, 1.0, 0.0) == doctest::Approx(1.0 + 1.0 / (1.0 - std::exp(-1.0))));
    CHECK(ode_envelope(1.0, 1.0, 1.0, 1.0, 0.0) == doctest::Approx(2.5820).epsilon(1e-4));
    CHECK(ode_envelope(1.0, 1.0, 1.0, 1.0, 2.0) == doctest::Approx(1.7173).epsilon(1e-4));
    CHECK(ode_envelope(3.0, 0.5, 0.0, 1.0, 2.0) == doctest::Approx(3.0 * std::exp(-1.0)));
}

TEST_CASE("ODE envelope dominates random trajectories")
{
    const OdeSweepResult r = ode_envelope_sweep(100, 3);
    CHECK(r.trials == 100);
    CHECK(r.violations == 0);
    CHECK(r.worst_margin >= 0.0);
    // The rescaling makes the hypothesis nearly tight, so the bound is not vacuous.
    CHECK(r.worst_margin < 0.5);
}

TEST_CASE("M_k iteration")
{
    const MkResult closed = mk_limit_check(2.0, 1.0, 1.0, 40, [](int k, double, double) {
        return std::ldexp(1.0, k) * std::log(2.0);
    });
    CHECK(closed.liminf_est == doctest::Approx(2.0));
    CHECK(closed.bound == doctest::Approx(4.0 * std::numbers::sqrt2));
    CHECK(closed.ok);

    const MkResult eq = mk_limit_check(1.0, 2.0, 1.0, 30, mk_equality());
    CHECK(eq.ok);
    CHECK(std::isfinite(eq.liminf_est));
    CHECK(eq.liminf_est > 1.0);

    CHECK_THROWS_AS(mk_limit_check(0.5, 1.0, 1.0, 10, mk_equality()), std::invalid_argument);
    CHECK_THROWS_AS(mk_limit_check(1.0, 1.0, 1.0, 10, [](int, double, double u) { return 2.0 * u + 1.0; }),
                    std::invalid_argument);
}

TEST_CASE("calibration and hold-out")
{
    const std::vector<GapTerms> train{{1.0, 0.0, 1.0}, {3.0, 1.0, 2.0}};
    const std::vector<GapTerms> hold{{1.5, 0.0, 1.0}, {2.5, 0.0, 1.0}};
    const CalibrationResult c = calibrate(train, hold);
    CHECK(c.constant == doctest::Approx(2.0));
    CHECK(c.violations == 1);
    CHECK_FALSE(c.pass);
    CHECK(calibrate(train, hold, 3.0).pass);
}

TEST_CASE("lemma report")
{
    LemmaConfig cfg;
    cfg.corpus_size = 20;
    cfg.grid_n = 24;
    cfg.random_trials = 20;
    const auto rows = verify_lemmas(cfg);
    CHECK(rows.size() == 8);
    for (const auto& r : rows) CHECK_MESSAGE(r.pass, r.name);
    const std::string text = format_lemma_report(rows);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("FAIL") == std::string::npos);
}
