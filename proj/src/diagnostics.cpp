#include "chemoflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chemoflow/operators.hpp"

namespace chemoflow {

EnergyCoefficients make_coefficients(const ModelSpec& spec)
{
    EnergyCoefficients c;
    c.s0 = threshold_s0(spec);
    c.kappa = kappa_of(c.s0, spec);
    return c;
}

void validate_coefficients(const EnergyCoefficients& c)
{
    for (double v : {c.b1, c.b2, c.b3, c.bhat2, c.bhat3, c.s0, c.kappa, c.mu, c.Gamma})
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("energy coefficients must be positive");
    if (c.delta != EnergyCoefficients::kDelta) throw std::invalid_argument("delta is fixed to 1/(5+sqrt 2)^2");
    if (!(c.q > 0.0 && c.q < 1.0)) throw std::invalid_argument("signal weight exponent q must lie in (0,1)");
}

const std::vector<RecordColumn>& record_columns()
{
    using R = DiagnosticsRecord;
    static const std::vector<RecordColumn> cols{
        {"t", &R::t},           {"mass_n", &R::mass_n},       {"c_max", &R::c_max},   {"c_min", &R::c_min},
        {"n_max", &R::n_max},   {"div_u_max", &R::div_u_max}, {"E_u", &R::E_u},       {"enstrophy", &R::enstrophy},
        {"I_logn", &R::I_logn}, {"I_D2grad", &R::I_D2grad},   {"I_Dlog", &R::I_Dlog}, {"I_c4", &R::I_c4},
        {"I_c6", &R::I_c6},     {"I_mix", &R::I_mix},         {"I_cq", &R::I_cq},     {"F", &R::F},
        {"G", &R::G},           {"clamp_mass", &R::clamp_mass},
    };
    return cols;
}

ScalarField grad_squared(const ScalarField& f)
{
    const VectorField g = grad(f);
    const Grid& gr = f.grid;
    ScalarField out(gr);
    for (int j = 0; j < gr.ny(); ++j)
        for (int i = 0; i < gr.nx(); ++i) {
            const double xl = g.x(i, j), xr = g.x(i + 1, j);
            const double yb = g.y(i, j), yt = g.y(i, j + 1);
            out(i, j) = 0.5 * (xl * xl + xr * xr) + 0.5 * (yb * yb + yt * yt);
        }
    return out;
}

namespace {

// Sum over faces of weight(n_face) * (face difference)^2, times the cell area.
double face_weighted_dirichlet(const ScalarField& n, const std::function<double(double)>& weight)
{
    const Grid& g = n.grid;
    const VectorField gn = grad(n);
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) {
            const double d = gn.x(i, j);
            if (d != 0.0) s += weight(0.5 * (n(i - 1, j) + n(i, j))) * d * d;
        }
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double d = gn.y(i, j);
            if (d != 0.0) s += weight(0.5 * (n(i, j - 1) + n(i, j))) * d * d;
        }
    return s * g.cell_area();
}

// -<u, lap_h u> for no-slip u: squared differences, wall terms at half weight.
double velocity_dirichlet(const VectorField& u)
{
    const Grid& g = u.grid;
    const int nx = g.nx();
    const int ny = g.ny();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double a = u.x(i, j);
            const double dx = (u.x(i + 1, j) - a) * ihx;
            s += dx * dx;
            if (i == 1) s += std::pow((a - u.x(0, j)) * ihx, 2);
            if (j == 0) s += 0.5 * std::pow(2.0 * a * ihy, 2);
            if (j == ny - 1) s += 0.5 * std::pow(2.0 * a * ihy, 2);
            else s += std::pow((u.x(i, j + 1) - a) * ihy, 2);
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double b = u.y(i, j);
            const double dy = (u.y(i, j + 1) - b) * ihy;
            s += dy * dy;
            if (j == 1) s += std::pow((b - u.y(i, 0)) * ihy, 2);
            if (i == 0) s += 0.5 * std::pow(2.0 * b * ihx, 2);
            if (i == nx - 1) s += 0.5 * std::pow(2.0 * b * ihx, 2);
            else s += std::pow((u.y(i + 1, j) - b) * ihx, 2);
        }
    return s * g.cell_area();
}

}  // namespace

DiagnosticsRecord record(const State& state, const ModelSpec& spec, const EnergyCoefficients& coeffs,
                         const TruncationTable& table, double clamp_mass)
{
    const ScalarField& n = state.n;
    const ScalarField& c = state.c;
    const Grid& g = n.grid;
    const std::size_t cells = g.cell_count();

    DiagnosticsRecord r;
    r.t = state.t;
    r.mass_n = integrate(n);
    r.c_max = c.max();
    r.c_min = c.min();
    r.n_max = n.max();
    {
        const ScalarField d = div(state.u);
        for (double v : d.values) r.div_u_max = std::max(r.div_u_max, std::abs(v));
    }
    r.E_u = face_inner(state.u, state.u);
    r.enstrophy = velocity_dirichlet(state.u);

    const ScalarField gc2 = grad_squared(c);
    std::vector<double> logn(cells), c4(cells), c6(cells), mix(cells), cq(cells), nc(cells), d2(cells), psi(cells);
    for (std::size_t k = 0; k < cells; ++k) {
        const double nk = n.values[k];
        const double ck = c.values[k];
        const double q2 = gc2.values[k];
        logn[k] = nk * std::log1p(nk);
        const double q_over_c = q2 / ck;  // |grad c|^2 / c
        c4[k] = q_over_c * q_over_c / ck;
        c6[k] = q_over_c * q_over_c * q_over_c / (ck * ck);
        mix[k] = nk * nk * q_over_c;
        nc[k] = nk * q_over_c;
        cq[k] = q2 * std::pow(ck, coeffs.q - 2.0);
        d2[k] = eval_D_primitives(nk, spec).d2;
        psi[k] = table.psi2(nk);
    }
    r.I_logn = integrate(g, logn);
    r.I_c4 = integrate(g, c4);
    r.I_c6 = integrate(g, c6);
    r.I_mix = integrate(g, mix);
    r.I_cq = integrate(g, cq);
    r.I_nc = integrate(g, nc);
    r.I_D2 = integrate(g, d2);
    r.I_psi2 = integrate(g, psi);

    r.I_D2grad = face_weighted_dirichlet(n, [&](double nf) {
        const double d = eval_D_eps(nf, spec);
        return d * d;
    });
    r.I_Dlog = face_weighted_dirichlet(n, [&](double nf) { return eval_D_eps(nf, spec) / ((nf + 1.0) * (nf + 1.0)); });

    r.F = r.I_D2 + coeffs.b1 * r.I_nc + coeffs.b2 * r.I_c4 + coeffs.b3 * r.I_psi2;
    r.G = r.I_D2 + coeffs.bhat2 * r.I_c4 + coeffs.bhat3 * r.I_psi2;
    r.clamp_mass = clamp_mass;
    return r;
}

Functional select_functional(const ModelSpec& spec, double n0_l1)
{
    if (!(spec.gamma >= 0.0 && spec.gamma <= 5.0 / 6.0))
        throw std::invalid_argument("sensitivity exponent must satisfy gamma in [0,5/6]");
    if (spec.gamma <= 0.5) return Functional::F;
    if (!(n0_l1 <= spec.M))
        throw std::invalid_argument("gamma > 1/2 requires also ||n0||_{L1} <= M (got " + std::to_string(n0_l1) +
                                    " > " + std::to_string(spec.M) + ")");
    return Functional::G;
}

double functional_value(const DiagnosticsRecord& r, Functional which) { return which == Functional::F ? r.F : r.G; }

std::vector<double> envelope_residuals(const std::vector<DiagnosticsRecord>& series, Functional which, double mu,
                                       double Gamma)
{
    std::vector<double> res;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double dt = series[k + 1].t - series[k].t;
        if (!(dt > 0.0)) continue;
        const double f0 = functional_value(series[k], which);
        const double f1 = functional_value(series[k + 1], which);
        res.push_back((f1 - f0) / dt + mu * (f0 + series[k].I_c6) - Gamma);
    }
    return res;
}

namespace {

double nonpositive_fraction(const std::vector<double>& r)
{
    if (r.empty()) return 1.0;
    const auto good = std::count_if(r.begin(), r.end(), [](double v) { return v <= 0.0; });
    return static_cast<double>(good) / static_cast<double>(r.size());
}

bool envelope_holds(const std::vector<DiagnosticsRecord>& series, Functional which, double bound, double tol)
{
    return std::all_of(series.begin(), series.end(),
                       [&](const DiagnosticsRecord& r) { return functional_value(r, which) <= bound * (1.0 + tol); });
}

}  // namespace

EnvelopeReport functional_envelope(const std::vector<DiagnosticsRecord>& series, const EnergyCoefficients& coeffs,
                                   Functional which, double quantile, double tol)
{
    if (series.empty()) throw std::invalid_argument("functional_envelope needs a non-empty series");
    if (!(coeffs.mu > 0.0) || !(coeffs.Gamma > 0.0)) throw std::invalid_argument("mu and Gamma must be positive");

    EnvelopeReport rep;
    rep.which = which;
    const double f0 = functional_value(series.front(), which);
    for (const auto& r : series) rep.max_value = std::max(rep.max_value, functional_value(r, which));

    const auto given = envelope_residuals(series, which, coeffs.mu, coeffs.Gamma);
    rep.intervals = given.size();
    rep.given_fraction = nonpositive_fraction(given);
    rep.given_envelope_ok = envelope_holds(series, which, std::max(f0, coeffs.Gamma / coeffs.mu), tol);

    const double scale = std::max(f0, 1e-12);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
        const double mu = std::pow(10.0, (k - 10) / 5.0);
        for (int l = 0; l < 20; ++l) {
            const double Gamma = scale * std::pow(10.0, (l - 8) / 2.0);
            const double frac = nonpositive_fraction(envelope_residuals(series, which, mu, Gamma));
            if (frac < quantile) continue;
            const double bound = std::max(f0, Gamma / mu);
            if (bound < best || (bound == best && mu > rep.mu)) {
                best = bound;
                rep.feasible = true;
                rep.mu = mu;
                rep.Gamma = Gamma;
                rep.fraction = frac;
                rep.bound = bound;
            }
        }
    }
    if (rep.feasible) rep.envelope_ok = envelope_holds(series, which, rep.bound, tol);
    return rep;
}

std::vector<std::pair<double, double>> window_averages(const std::vector<DiagnosticsRecord>& series,
                                                       double DiagnosticsRecord::*field, double window)
{
    std::vector<std::pair<double, double>> out;
    if (series.size() < 2) return out;
    const double t_last = series.back().t;
    const double slack = 1e-9 * window;
    for (std::size_t a = 0; a < series.size(); ++a) {
        const double ta = series[a].t;
        if (ta + window > t_last + slack) break;
        double acc = 0.0;
        std::size_t b = a;
        while (b + 1 < series.size() && series[b + 1].t <= ta + window + slack) {
            acc += 0.5 * (series[b].*field + series[b + 1].*field) * (series[b + 1].t - series[b].t);
            ++b;
        }
        const double span = series[b].t - ta;
        if (span > 0.0) out.emplace_back(ta, acc / span);
    }
    return out;
}

double running_max_growth(const std::vector<std::pair<double, double>>& samples, double t_from)
{
    double base = std::numeric_limits<double>::quiet_NaN();
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : samples) {
        if (t + 1e-12 < t_from) continue;
        if (std::isnan(base)) base = v;
        peak = std::max(peak, v);
    }
    if (std::isnan(base)) throw std::invalid_argument("running_max_growth: no samples at or after t_from");
    if (base == 0.0) return peak > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::max(0.0, (peak - base) / std::abs(base));
}

}  // namespace chemoflow
