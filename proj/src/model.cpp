#include "chemoflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace chemoflow {

namespace {

double smoothstep(double s)
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * (3.0 - 2.0 * s);
}

double tabulated_value(const Tabulated& tab, double n)
{
    const auto& k = tab.knots;
    const auto& v = tab.values;
    if (n <= k.front()) return v.front();
    if (n >= k.back()) return v.back();
    const auto it = std::upper_bound(k.begin(), k.end(), n);
    const std::size_t hi = static_cast<std::size_t>(it - k.begin());
    const std::size_t lo = hi - 1;
    const double w = (n - k[lo]) / (k[hi] - k[lo]);
    return (1.0 - w) * v[lo] + w * v[hi];
}

double simpson(double a, double fa, double b, double fb, double fm)
{
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                        double fm, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw std::runtime_error("diffusion primitive quadrature did not converge");
    return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

/// int_a^b f split at the tabulation knots, each piece by adaptive Simpson.
double integrate_piecewise(const std::function<double(double)>& f, const std::vector<double>& knots, double a,
                           double b)
{
    std::vector<double> cuts{a};
    for (double k : knots)
        if (k > a && k < b) cuts.push_back(k);
    cuts.push_back(b);

    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double lo = cuts[p];
        const double hi = cuts[p + 1];
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(0.5 * (lo + hi));
        const double whole = simpson(lo, flo, hi, fhi, fmid);
        const double tol = 1e-13 * std::max(std::abs(whole), std::numeric_limits<double>::min());
        total += adaptive_simpson(f, lo, hi, flo, fhi, fmid, whole, tol, 40);
    }
    return total;
}

/// sum_{k>=2} binom(p, k) x^k for |x| small, with p = m + 1.
double binomial_tail(double p, double x)
{
    double term = p * (p - 1.0) / 2.0 * x * x;
    double sum = term;
    for (int k = 3; k < 60; ++k) {
        term *= (p - k + 1.0) / k * x;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

void validate_model(const ModelSpec& spec)
{
    if (!(spec.gamma >= 0.0 && spec.gamma <= 5.0 / 6.0))
        throw std::invalid_argument("sensitivity exponent must satisfy gamma in [0,5/6]");
    if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0))
        throw std::invalid_argument("regularization must satisfy epsilon in (0,1)");
    if (!(spec.s0_sensitivity >= 0.0) || !std::isfinite(spec.s0_sensitivity))
        throw std::invalid_argument("sensitivity constant S0 must be finite and non-negative");
    if (!std::isfinite(spec.phi_gradient[0]) || !std::isfinite(spec.phi_gradient[1]))
        throw std::invalid_argument("potential gradient must be finite");
    if (!(spec.L > 0.0)) throw std::invalid_argument("diffusion threshold L must be positive");
    if (!(spec.M > 0.0)) throw std::invalid_argument("bound M must be positive");

    if (const auto* pm = std::get_if<PorousMedium>(&spec.diffusion)) {
        if (!(pm->m > 1.0 && pm->m <= 2.0))
            throw std::invalid_argument("porous-medium exponent must satisfy m in (1,2] (inf D(n)/n > 0 near 0)");
    } else {
        const auto& tab = std::get<Tabulated>(spec.diffusion);
        if (tab.knots.size() < 2 || tab.knots.size() != tab.values.size())
            throw std::invalid_argument("tabulated diffusion needs at least two (knot, value) pairs");
        if (tab.knots.front() != 0.0) throw std::invalid_argument("tabulated diffusion must start at n = 0");
        for (std::size_t k = 0; k < tab.knots.size(); ++k) {
            if (k > 0 && !(tab.knots[k] > tab.knots[k - 1]))
                throw std::invalid_argument("tabulated knots must be strictly increasing");
            if (!(tab.values[k] >= 0.0) || !std::isfinite(tab.values[k]))
                throw std::invalid_argument("tabulated diffusion values must be finite and non-negative");
            if (k > 0 && !(tab.values[k] > 0.0))
                throw std::invalid_argument("tabulated diffusion must be positive on (0,inf)");
        }
    }
}

double spectral_norm(const Mat2& m)
{
    // sigma_max = (|z1| + |z2|) / 2 with z1, z2 the conformal/anticonformal parts.
    const double z1 = std::hypot(m.a11 + m.a22, m.a21 - m.a12);
    const double z2 = std::hypot(m.a11 - m.a22, m.a21 + m.a12);
    return 0.5 * (z1 + z2);
}

double eval_D(double n, const ModelSpec& spec)
{
    if (const auto* pm = std::get_if<PorousMedium>(&spec.diffusion)) {
        if (pm->m == 2.0) return n;
        return std::pow(n, pm->m - 1.0);
    }
    return tabulated_value(std::get<Tabulated>(spec.diffusion), n);
}

double eval_D_eps(double n, const ModelSpec& spec)
{
    if (const auto* pm = std::get_if<PorousMedium>(&spec.diffusion)) {
        if (pm->m == 2.0) return n + spec.epsilon;
        return std::pow(n + std::pow(spec.epsilon, 1.0 / (pm->m - 1.0)), pm->m - 1.0);
    }
    return tabulated_value(std::get<Tabulated>(spec.diffusion), n) + spec.epsilon;
}

DiffusionPrimitives eval_D_primitives(double n, const ModelSpec& spec)
{
    if (n <= 0.0) return {};
    if (const auto* pm = std::get_if<PorousMedium>(&spec.diffusion)) {
        const double m = pm->m;
        if (spec.epsilon == 0.0) return {std::pow(n, m) / m, std::pow(n, m + 1.0) / (m * (m + 1.0))};
        // D_eps(s) = (s + a)^(m-1)
        const double a = std::pow(spec.epsilon, 1.0 / (m - 1.0));
        const double x = n / a;
        const double am = std::pow(a, m);
        const double d1 = am * std::expm1(m * std::log1p(x)) / m;
        double d2;
        if (x < 0.1)
            d2 = am * a * binomial_tail(m + 1.0, x) / (m * (m + 1.0));
        else
            d2 = am * a * std::expm1((m + 1.0) * std::log1p(x)) / (m * (m + 1.0)) - am * n / m;
        return {d1, d2};
    }
    const auto& tab = std::get<Tabulated>(spec.diffusion);
    const auto d_eps = [&](double s) { return eval_D_eps(s, spec); };
    const auto kernel = [&](double s) { return (n - s) * eval_D_eps(s, spec); };
    return {integrate_piecewise(d_eps, tab.knots, 0.0, n), integrate_piecewise(kernel, tab.knots, 0.0, n)};
}

double rho_eps(double wall_distance, double eps) { return smoothstep((wall_distance - eps) / eps); }

double chi_eps(double n, double eps)
{
    const double inv = 1.0 / eps;
    return 1.0 - smoothstep((n - inv) / inv);
}

double sensitivity_magnitude(double c, const ModelSpec& spec)
{
    if (spec.gamma == 0.0) return spec.s0_sensitivity;
    if (spec.gamma == 0.5) return spec.s0_sensitivity / std::sqrt(c);
    return spec.s0_sensitivity * std::pow(c, -spec.gamma);
}

Mat2 sensitivity_orientation(const ModelSpec& spec)
{
    if (spec.sensitivity_kind == SensitivityKind::Isotropic) return {1.0, 0.0, 0.0, 1.0};
    const double cs = std::cos(spec.theta);
    const double sn = std::sin(spec.theta);
    return {cs, -sn, sn, cs};
}

Mat2 eval_S_eps(double wall_distance, double n, double c, const ModelSpec& spec)
{
    const double eps = spec.epsilon;
    const double scale = rho_eps(wall_distance, eps) * chi_eps(n, eps);
    if (scale == 0.0) return {};
    const double s = scale * sensitivity_magnitude(c + eps, spec);
    const Mat2 r = sensitivity_orientation(spec);
    return {s * r.a11, s * r.a12, s * r.a21, s * r.a22};
}

Mat2 eval_S_eps(const Grid& domain, double x, double y, double n, double c, const ModelSpec& spec)
{
    return eval_S_eps(domain.wall_distance(x, y), n, c, spec);
}

double threshold_s0(const ModelSpec& spec)
{
    const double L = spec.L;
    if (!(L > 0.0)) throw std::domain_error("threshold requires L > 0");

    if (std::holds_alternative<PorousMedium>(spec.diffusion)) {
        // D(s) = s^(m-1) is increasing: bisect for the crossing.
        double lo = 0.0;
        double hi = 1.0;
        while (eval_D(hi, spec) < L) {
            hi *= 2.0;
            if (!std::isfinite(hi)) throw std::domain_error("L unreachable: diffusion never exceeds L");
        }
        for (int it = 0; it < 2000 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eval_D(mid, spec) >= L ? hi : lo) = mid;
        }
        return hi;
    }

    const auto& tab = std::get<Tabulated>(spec.diffusion);
    if (tab.values.back() < L) throw std::domain_error("L unreachable: liminf of D does not exceed L");
    // Walk back from the constant tail to the last knot below L.
    std::size_t k = tab.knots.size() - 1;
    while (k > 0 && tab.values[k - 1] >= L) --k;
    if (k == 0) return tab.knots[1];
    const double v0 = tab.values[k - 1];
    const double v1 = tab.values[k];
    const double w = (L - v0) / (v1 - v0);
    return tab.knots[k - 1] + w * (tab.knots[k] - tab.knots[k - 1]);
}

double kappa_of(double s0, const ModelSpec& spec)
{
    if (!(s0 > 0.0)) throw std::domain_error("kappa requires s0 > 0");
    constexpr double kFloor = 1e-12;

    if (const auto* pm = std::get_if<PorousMedium>(&spec.diffusion)) {
        if (pm->m > 2.0) throw std::domain_error("degenerate near zero: D(n)/n -> 0 as n -> 0 for m > 2");
        if (pm->m == 2.0) return 1.0;
        return std::pow(2.0 * s0, pm->m - 2.0);
    }

    // D/n = alpha/n + beta on every linear piece, so the infimum sits at a
    // knot, at 2 s0, or in the limit n -> 0.
    const auto& tab = std::get<Tabulated>(spec.diffusion);
    const double top = 2.0 * s0;
    double inf = eval_D(top, spec) / top;
    for (double k : tab.knots)
        if (k > 0.0 && k < top) inf = std::min(inf, eval_D(k, spec) / k);
    if (tab.values.front() == 0.0) {
        const double slope = tab.values[1] / tab.knots[1];
        inf = std::min(inf, slope);
    }
    if (!(inf > kFloor)) throw std::domain_error("degenerate near zero: inf D(n)/n vanishes");
    return inf;
}

TruncationTable::TruncationTable(const ModelSpec& spec, double s0)
    : s0_(s0),
      kappa_(kappa_of(s0, spec)),
      ds_(2.0 * s0 / kSamples),
      d_eps_s0_(eval_D_eps(s0, spec)),
      psi0_(kSamples + 1),
      psi1_(kSamples + 1),
      psi2_(kSamples + 1),
      spec_(spec)
{
    for (int k = 0; k <= kSamples; ++k) psi0_[k] = psi0(k * ds_);

    // Cumulative Simpson from 2 s0 downward. Psi1 at interval midpoints
    // comes from a half-interval Simpson of Psi0.
    psi1_[kSamples] = 0.0;
    psi2_[kSamples] = 0.0;
    for (int k = kSamples - 1; k >= 0; --k) {
        const double a = k * ds_;
        const double b = a + ds_;
        const double m = 0.5 * (a + b);
        const double p0a = psi0_[k];
        const double p0b = psi0_[k + 1];
        const double p0m = psi0(m);
        psi1_[k] = psi1_[k + 1] - ds_ / 6.0 * (p0a + 4.0 * p0m + p0b);
        const double p1m = psi1_[k + 1] - 0.5 * ds_ / 6.0 * (p0m + 4.0 * psi0(0.5 * (m + b)) + p0b);
        psi2_[k] = psi2_[k + 1] - ds_ / 6.0 * (psi1_[k] + 4.0 * p1m + psi1_[k + 1]);
    }

    const double bound = psi2_bound();
    for (int k = 0; k <= kSamples; ++k) {
        if (psi2_[k] < -1e-12 * bound || psi2_[k] > bound * (1.0 + 1e-9))
            throw std::runtime_error("truncation bound 0 <= Psi2 <= 3 s0 / kappa violated at s = " +
                                     std::to_string(k * ds_));
    }
}

double TruncationTable::psi0(double s) const
{
    if (s > 2.0 * s0_) return 0.0;
    if (s >= s0_) return (2.0 * s0_ - s) / (s0_ * d_eps_s0_);
    return 1.0 / eval_D_eps(std::max(s, 0.0), spec_);
}

double TruncationTable::interpolate(const std::vector<double>& table, double s) const
{
    if (s >= 2.0 * s0_) return 0.0;
    if (s <= 0.0) return table.front();
    const double pos = s / ds_;
    const int k = std::min(static_cast<int>(pos), kSamples - 1);
    const double w = pos - k;
    return (1.0 - w) * table[k] + w * table[k + 1];
}

double TruncationTable::psi1(double s) const { return interpolate(psi1_, s); }
double TruncationTable::psi2(double s) const { return interpolate(psi2_, s); }

TruncationTable build_truncations(const ModelSpec& spec, double s0) { return TruncationTable(spec, s0); }

}  // namespace chemoflow
