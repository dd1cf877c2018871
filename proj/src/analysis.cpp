#include "chemoflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "chemoflow/diagnostics.hpp"
#include "chemoflow/operators.hpp"

namespace chemoflow {

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField cosine_series(const Grid& g, std::mt19937_64& rng, int modes, double amplitude)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> coeff(static_cast<std::size_t>(modes + 1) * (modes + 1), 0.0);
    for (int l = 0; l <= modes; ++l)
        for (int k = 0; k <= modes; ++k) {
            const double w = amplitude / (1.0 + k * k + l * l);
            const double draw = normal(rng);
            if (k + l > 0) coeff[static_cast<std::size_t>(l) * (modes + 1) + k] = w * draw;
        }
    return sample(g, [&](double x, double y) {
        double s = 0.0;
        for (int l = 0; l <= modes; ++l) {
            const double cy = std::cos(l * kPi * y / g.ly());
            for (int k = 0; k <= modes; ++k)
                s += coeff[static_cast<std::size_t>(l) * (modes + 1) + k] * std::cos(k * kPi * x / g.lx()) * cy;
        }
        return s;
    });
}

struct Derivatives {
    double x, y, xx, yy, xy;

    double grad2() const { return x * x + y * y; }
    double hess2() const { return xx * xx + yy * yy + 2.0 * xy * xy; }
};

template <class F>
Derivatives centred(const Grid& g, int i, int j, F&& f)
{
    const double hx = g.hx(), hy = g.hy();
    const double c = f(i, j);
    Derivatives d;
    d.x = (f(i + 1, j) - f(i - 1, j)) / (2.0 * hx);
    d.y = (f(i, j + 1) - f(i, j - 1)) / (2.0 * hy);
    d.xx = (f(i + 1, j) - 2.0 * c + f(i - 1, j)) / (hx * hx);
    d.yy = (f(i, j + 1) - 2.0 * c + f(i, j - 1)) / (hy * hy);
    d.xy = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * hx * hy);
    return d;
}

double log_mix(double x, double y)
{
    // log(e^x + e^y) without overflow.
    if (x == -std::numeric_limits<double>::infinity()) return y;
    const double hi = std::max(x, y), lo = std::min(x, y);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

FieldCorpus make_corpus(const Grid& g, int count, std::uint64_t base_seed, double floor, int modes, double amplitude)
{
    if (count < 0 || modes < 1 || !(floor > 0.0)) throw std::invalid_argument("corpus: count >= 0, modes >= 1, floor > 0");
    FieldCorpus corpus{g, floor, {}};
    corpus.members.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
        std::mt19937_64 rng(seed);
        ScalarField phi = cosine_series(g, rng, modes, amplitude);
        ScalarField psi = cosine_series(g, rng, modes, amplitude);
        const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double shift = floor + offset - phi.min();
        for (double& v : phi.values) v += shift;
        const double level = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
        for (double& v : psi.values) v += level;
        corpus.members.push_back({seed, std::move(phi), std::move(psi)});
    }
    return corpus;
}

LogHessianResult log_hessian_identity_residual(const ScalarField& phi)
{
    const Grid& g = phi.grid;
    const int nx = g.nx(), ny = g.ny();
    ScalarField lnphi(g);
    for (std::size_t k = 0; k < phi.values.size(); ++k) lnphi.values[k] = std::log(phi.values[k]);
    auto at = [&](int i, int j) { return phi.ghosted(i, j); };
    auto at_ln = [&](int i, int j) { return lnphi.ghosted(i, j); };

    ScalarField g2(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) g2(i, j) = centred(g, i, j, at).grad2();

    LogHessianResult out;
    for (int j = 2; j < ny - 2; ++j)
        for (int i = 2; i < nx - 2; ++i) {
            const Derivatives d = centred(g, i, j, at);
            const Derivatives dl = centred(g, i, j, at_ln);
            const double p = phi(i, j);
            const double g2x = (g2(i + 1, j) - g2(i - 1, j)) / (2.0 * g.hx());
            const double g2y = (g2(i, j + 1) - g2(i, j - 1)) / (2.0 * g.hy());
            const double rhs = p * p * dl.hess2() + (g2x * d.x + g2y * d.y) / p - d.grad2() * d.grad2() / (p * p);
            out.res_identity = std::max(out.res_identity, std::abs(d.hess2() - rhs));
        }

    double weighted = 0.0, six = 0.0, mixed = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Derivatives d = centred(g, i, j, at);
            const Derivatives dl = centred(g, i, j, at_ln);
            const double p = phi(i, j);
            const double q = d.grad2();
            weighted += q / p * dl.hess2();
            six += q * q * q / std::pow(p, 5);
            mixed += d.hess2() * q / (p * p * p);
        }
    const double area = g.cell_area();
    const double k1 = (4.0 + std::numbers::sqrt2) * (4.0 + std::numbers::sqrt2);
    const double k2 = (5.0 + std::numbers::sqrt2) * (5.0 + std::numbers::sqrt2);
    out.gap_est1 = area * (k1 * weighted - six);
    out.gap_est2 = area * (k2 * weighted - mixed);
    return out;
}

double GapTerms::rhs_scale(double K) const
{
    return std::abs(rest) + std::abs(K * coef);
}

GapTerms trudinger_terms(const ScalarField& phi, const ScalarField& psi, double a, double eta)
{
    const Grid& g = phi.grid;
    const double mass = integrate(phi);
    const double mean = mass / g.area();
    double entropy = 0.0, pairing = 0.0, abs_psi = 0.0;
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
        const double p = phi.values[k];
        if (p > 0.0) entropy += p * std::log(p / mean);
        pairing += p * std::abs(psi.values[k]);
        abs_psi += std::abs(psi.values[k]);
    }
    const double area = g.cell_area();
    const VectorField gp = grad(psi);
    const double dirichlet = face_inner(gp, gp);
    abs_psi *= area;
    GapTerms t;
    t.lhs = area * pairing;
    t.rest = area * entropy / a + (1.0 + eta) * a / (8.0 * kPi) * mass * dirichlet;
    t.coef = a * mass * abs_psi * abs_psi + mass / a;
    return t;
}

double trudinger_gap(const ScalarField& phi, const ScalarField& psi, double a, double eta, double K)
{
    return trudinger_terms(phi, psi, a, eta).gap(K);
}

GapTerms trudinger_sublevel_terms(const ScalarField& phi, double L, double s0_tilde,
                                  const std::function<double(double)>& D_tilde, double eta)
{
    const Grid& g = phi.grid;
    const double area = g.cell_area();
    const double mass = integrate(phi);
    double upper = 0.0;
    for (double p : phi.values)
        if (p > s0_tilde + 1.0) upper += p * std::log(p + 1.0);

    double weighted = 0.0;
    auto face = [&](double a, double b, double h) {
        const double pf = 0.5 * (a + b);
        const double d = (b - a) / h;
        weighted += D_tilde(pf) * d * d / ((pf + 1.0) * (pf + 1.0));
    };
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) face(phi(i - 1, j), phi(i, j), g.hx());
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) face(phi(i, j - 1), phi(i, j), g.hy());
    weighted *= area;

    GapTerms t;
    t.lhs = area * upper;
    t.rest = -std::log(mass / g.area()) * mass;
    t.coef = (1.0 + eta) / L * mass * weighted + mass * mass * mass + mass + 1.0;
    return t;
}

double trudinger_sublevel_gap(const ScalarField& phi, double L, double s0_tilde,
                              const std::function<double(double)>& D_tilde, double eta, double K)
{
    return trudinger_sublevel_terms(phi, L, s0_tilde, D_tilde, eta).gap(K);
}

GapTerms poincare_subset_terms(const ScalarField& phi, const std::vector<char>& B_mask, double p, double varpi)
{
    const Grid& g = phi.grid;
    if (B_mask.size() != g.cell_count()) throw std::invalid_argument("poincare: mask size must match the grid");
    if (!(p >= 1.0)) throw std::invalid_argument("poincare: p >= 1 required");
    std::size_t count = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < B_mask.size(); ++k)
        if (B_mask[k]) {
            ++count;
            sum += phi.values[k];
        }
    if (count == 0) throw std::invalid_argument("poincare: empty subset B");
    const double area = g.cell_area();
    if (static_cast<double>(count) * area < varpi) throw std::invalid_argument("poincare: |B| < varpi");
    const double avg = sum / static_cast<double>(count);

    const ScalarField q = grad_squared(phi);
    double dev = 0.0, grad_p = 0.0;
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
        dev += std::pow(std::abs(phi.values[k] - avg), p);
        grad_p += std::pow(q.values[k], 0.5 * p);
    }
    GapTerms t;
    t.lhs = std::pow(area * dev, 1.0 / p);
    t.rest = 0.0;
    t.coef = std::pow(area * grad_p, 1.0 / p);
    return t;
}

double poincare_subset_gap(const ScalarField& phi, const std::vector<char>& B_mask, double p, double C, double varpi)
{
    return poincare_subset_terms(phi, B_mask, p, varpi).gap(C);
}

double ode_envelope(double y0, double a, double b, double tau, double t)
{
    return std::exp(-a * t) * y0 + b * tau / (1.0 - std::exp(-a * tau));
}

OdeSweepResult ode_envelope_sweep(int trials, std::uint64_t seed, double horizon)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OdeSweepResult out;
    out.trials = trials;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        const double a = 0.1 + 2.9 * unit(rng);
        const double b = 0.1 + 2.9 * unit(rng);
        const double tau = 0.2 + 1.8 * unit(rng);
        const double y0 = 5.0 * unit(rng);

        // Pieces [edges[k], edges[k+1]) with value h[k], covering [0, horizon + tau].
        std::vector<double> edges{0.0}, h;
        while (edges.back() < horizon + tau) {
            edges.push_back(edges.back() + std::exp(std::log(0.01) + unit(rng) * std::log(100.0)));
            const double u = unit(rng);
            h.push_back(unit(rng) < 0.1 ? 20.0 * u : u * u * u);
        }
        std::vector<double> prefix{0.0};
        for (std::size_t k = 0; k < h.size(); ++k) prefix.push_back(prefix.back() + h[k] * (edges[k + 1] - edges[k]));
        auto integral_to = [&](double x) {
            const auto it = std::upper_bound(edges.begin(), edges.end(), x);
            const std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - edges.begin() - 1));
            if (k >= h.size()) return prefix.back();
            return prefix[k] + h[k] * (x - edges[k]);
        };
        // The window integral is piecewise linear in t; its maximum sits where t or t+tau is an edge.
        double window_max = 0.0;
        auto probe = [&](double t) {
            if (t < 0.0 || t > horizon) return;
            window_max = std::max(window_max, integral_to(t + tau) - integral_to(t));
        };
        probe(0.0);
        probe(horizon);
        for (double e : edges) {
            probe(e);
            probe(e - tau);
        }
        const double scale = window_max > 0.0 ? b * tau / window_max : 0.0;

        double y = y0;
        bool violated = false;
        for (std::size_t k = 0; k < h.size() && edges[k] < horizon; ++k) {
            const double hk = h[k] * scale;
            const double t0 = edges[k];
            const double len = std::min(edges[k + 1], horizon) - t0;
            for (int s = 1; s <= 4; ++s) {
                const double dt = len * s / 4.0;
                const double ys = std::exp(-a * dt) * y + hk * (-std::expm1(-a * dt)) / a;
                const double bound = ode_envelope(y0, a, b, tau, t0 + dt);
                const double margin = (bound - ys) / bound;
                out.worst_margin = std::min(out.worst_margin, margin);
                if (margin < -1e-12) violated = true;
            }
            y = std::exp(-a * len) * y + hk * (-std::expm1(-a * len)) / a;
        }
        if (violated) ++out.violations;
    }
    return out;
}

MkGenerator mk_equality()
{
    return [](int, double, double log_upper) { return log_upper; };
}

MkResult mk_limit_check(double M0, double a, double b, int k_max, const MkGenerator& generator)
{
    if (!(a >= 1.0) || !(b >= 1.0) || !(M0 >= 1.0)) throw std::invalid_argument("mk: a, b, M0 >= 1 required");
    if (k_max < 4 || k_max > 1000) throw std::invalid_argument("mk: k_max must lie in [4, 1000]");
    const double la = std::log(a), lb = std::log(b);
    double log_m = std::log(M0);
    std::vector<double> root;  // log M_k / 2^k
    for (int k = 1; k <= k_max; ++k) {
        const double pow2 = std::ldexp(1.0, k);
        const double log_upper = log_mix(k * la + 2.0 * log_m, pow2 * lb);
        const double next = generator(k, log_m, log_upper);
        const double slop = 1e-12 * std::max(1.0, std::abs(log_upper));
        if (!(next >= 0.0) || next > log_upper + slop)
            throw std::invalid_argument("mk: generated term violates 1 <= M_k <= a^k M_{k-1}^2 + b^(2^k)");
        log_m = next;
        root.push_back(log_m / pow2);
    }
    const std::size_t tail = std::max<std::size_t>(1, root.size() / 4);
    const double log_liminf = *std::min_element(root.end() - static_cast<std::ptrdiff_t>(tail), root.end());
    MkResult r;
    r.liminf_est = std::exp(log_liminf);
    r.bound = 2.0 * std::numbers::sqrt2 * a * a * a * b * M0;
    r.ok = r.liminf_est <= r.bound * (1.0 + 1e-9);
    return r;
}

CalibrationResult calibrate(const std::vector<GapTerms>& train, const std::vector<GapTerms>& held_out, double safety,
                            double tol)
{
    double need = 0.0;
    for (const GapTerms& t : train)
        if (t.coef > 0.0) need = std::max(need, t.needed());
    CalibrationResult r;
    r.constant = safety * need;
    r.worst_relative_gap = std::numeric_limits<double>::infinity();
    for (const GapTerms& t : held_out) {
        const double gap = t.gap(r.constant);
        const double scale = t.rhs_scale(r.constant);
        r.worst_relative_gap = std::min(r.worst_relative_gap, scale > 0.0 ? gap / scale : gap);
        if (gap < -tol * scale) ++r.violations;
    }
    if (held_out.empty()) r.worst_relative_gap = 0.0;
    r.pass = r.violations == 0;
    return r;
}

std::vector<LemmaRow> verify_lemmas(const LemmaConfig& cfg)
{
    std::vector<LemmaRow> rows;

    {
        std::vector<double> res;
        for (int n : {32, 64, 128}) {
            const Grid g = make_grid(n, n, 1.0, 1.0);
            res.push_back(log_hessian_identity_residual(sample(g, [](double x, double) { return std::exp(x); }))
                              .res_identity);
        }
        const double order = std::min(std::log2(res[0] / res[1]), std::log2(res[1] / res[2]));
        rows.push_back({"log-Hessian identity order (e^x)", order, res.back(), order >= 1.8});
    }

    const Grid g = make_grid(cfg.grid_n, cfg.grid_n, 1.0, 1.0);
    const FieldCorpus corpus = make_corpus(g, cfg.corpus_size, cfg.seed, cfg.floor);
    const std::size_t half = corpus.members.size() / 2;

    {
        double worst1 = std::numeric_limits<double>::infinity(), worst2 = worst1;
        for (const CorpusMember& m : corpus.members) {
            const LogHessianResult r = log_hessian_identity_residual(m.phi);
            worst1 = std::min(worst1, r.gap_est1);
            worst2 = std::min(worst2, r.gap_est2);
        }
        rows.push_back({"log-Hessian estimate (4+sqrt2)^2", std::pow(4.0 + std::numbers::sqrt2, 2), worst1,
                        worst1 >= -1e-8});
        rows.push_back({"log-Hessian estimate (5+sqrt2)^2", std::pow(5.0 + std::numbers::sqrt2, 2), worst2,
                        worst2 >= -1e-8});
    }

    auto split_calibrate = [&](const std::string& name, const std::function<GapTerms(const CorpusMember&)>& terms) {
        std::vector<GapTerms> train, hold;
        for (std::size_t k = 0; k < corpus.members.size(); ++k)
            (k < half ? train : hold).push_back(terms(corpus.members[k]));
        const CalibrationResult c = calibrate(train, hold);
        rows.push_back({name, c.constant, c.worst_relative_gap, c.pass});
    };

    split_calibrate("weighted Trudinger (K)",
                    [&](const CorpusMember& m) { return trudinger_terms(m.phi, m.psi, cfg.a, cfg.eta); });
    split_calibrate("Trudinger super-level (K)", [&](const CorpusMember& m) {
        return trudinger_sublevel_terms(m.phi, cfg.L, cfg.s0_tilde, [](double s) { return s; }, cfg.eta);
    });
    split_calibrate("Poincare on subsets (C)", [&](const CorpusMember& m) {
        // B: cells where psi is below its q-quantile, q in [varpi, 1).
        std::mt19937_64 rng(m.seed ^ 0x9e3779b97f4a7c15ULL);
        const double q = cfg.varpi + (1.0 - cfg.varpi) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        std::vector<double> sorted = m.psi.values;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t cut = std::min(sorted.size() - 1, static_cast<std::size_t>(std::ceil(q * sorted.size())));
        std::vector<char> mask(sorted.size());
        for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = m.psi.values[k] <= sorted[cut];
        return poincare_subset_terms(m.phi, mask, cfg.p, cfg.varpi);
    });

    {
        const OdeSweepResult r = ode_envelope_sweep(cfg.random_trials, cfg.seed);
        rows.push_back({"ODE envelope", static_cast<double>(r.trials), r.worst_margin, r.violations == 0});
    }

    {
        const MkResult closed = mk_limit_check(2.0, 1.0, 1.0, 40, [](int k, double, double) {
            return std::ldexp(1.0, k) * std::log(2.0);
        });
        double worst = closed.bound / closed.liminf_est;
        bool pass = closed.ok;
        std::mt19937_64 rng(cfg.seed + 7);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < cfg.random_trials; ++trial) {
            const double a = 1.0 + 2.0 * unit(rng), b = 1.0 + 2.0 * unit(rng), M0 = 1.0 + 9.0 * unit(rng);
            const MkResult r = mk_limit_check(M0, a, b, 40, [&](int, double, double log_upper) {
                return unit(rng) < 0.3 ? log_upper : log_upper * (1.0 - 0.5 * unit(rng));
            });
            worst = std::min(worst, r.bound / r.liminf_est);
            pass = pass && r.ok;
        }
        rows.push_back({"M_k iteration liminf", 2.0 * std::numbers::sqrt2, worst, pass});
    }
    return rows;
}

std::string format_lemma_report(const std::vector<LemmaRow>& rows)
{
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-36s %16s %16s  %s\n", "lemma", "constant", "worst", "status");
    out += line;
    for (const LemmaRow& r : rows) {
        std::snprintf(line, sizeof line, "%-36s %16.8g %16.8g  %s\n", r.name.c_str(), r.constant, r.worst,
                      r.pass ? "PASS" : "FAIL");
        out += line;
    }
    return out;
}

}  // namespace chemoflow
