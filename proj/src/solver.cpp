#include "chemoflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemoflow/operators.hpp"

namespace chemoflow {

namespace {

double max_abs_field(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_div(const VectorField& u)
{
    return max_abs_field(div(u).values);
}

/// Explicit conservative n-update with c and u frozen over [0, dt].
class DensityStepper {
public:
    DensityStepper(const ScalarField& c, const VectorField& u, const ModelSpec& spec, double safety, double dt_min)
        : g_(c.grid),
          spec_(spec),
          taxis_(taxis_coefficients(c, spec)),
          u_(u),
          safety_(safety),
          dt_min_(dt_min),
          fx_(g_.xface_count(), 0.0),
          fy_(g_.yface_count(), 0.0),
          rate_(g_.cell_count(), 0.0)
    {
        const auto* pm = std::get_if<PorousMedium>(&spec.diffusion);
        linear_ = pm != nullptr && pm->m == 2.0;
    }

    /// Returns the number of substeps; accumulates clamped mass.
    int advance(ScalarField& n, double dt, double& clamp_mass)
    {
        double done = 0.0;
        int count = 0;
        while (done < dt) {
            const double max_rate = fluxes(n);
            double dts = dt - done;
            if (max_rate > 0.0) dts = std::min(dts, safety_ / max_rate);
            if (dts < dt_min_ && dt - done > dt_min_)
                throw StabilityError("density substep collapsed below dt_min (rate " + std::to_string(max_rate) + ")");
            apply(n, dts, clamp_mass);
            done = (dt - done - dts <= 1e-15 * dt) ? dt : done + dts;
            ++count;
        }
        return count;
    }

private:
    double d_eps(double nf) const { return linear_ ? nf + spec_.epsilon : eval_D_eps(nf, spec_); }

    double taxis(double b, double nf) const
    {
        if (b == 0.0 || nf <= 1.0 / spec_.epsilon) return b;
        return chi_eps(nf, spec_.epsilon) * b;
    }

    // Face fluxes F = D grad n - n_up(w) w - n_up(u) u and the per-cell outflow rate.
    double fluxes(const ScalarField& n)
    {
        const int nx = g_.nx();
        const int ny = g_.ny();
        const double ihx = 1.0 / g_.hx();
        const double ihy = 1.0 / g_.hy();
        const double* nv = n.values.data();
        std::fill(rate_.begin(), rate_.end(), 0.0);

        for (int j = 0; j < ny; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * nx;
            for (int i = 1; i < nx; ++i) {
                const std::size_t f = g_.xface(i, j);
                const double nl = nv[row + i - 1];
                const double nr = nv[row + i];
                const double nf = 0.5 * (nl + nr);
                const double d = d_eps(nf);
                const double w = taxis(taxis_.bx[f], nf);
                const double a = u_.ux[f];
                fx_[f] = d * (nr - nl) * ihx - w * (w >= 0.0 ? nl : nr) - a * (a >= 0.0 ? nl : nr);
                const double dc = d * ihx * ihx;
                rate_[row + i - 1] += dc + (std::max(w, 0.0) + std::max(a, 0.0)) * ihx;
                rate_[row + i] += dc + (std::max(-w, 0.0) + std::max(-a, 0.0)) * ihx;
            }
        }
        for (int j = 1; j < ny; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * nx;
            for (int i = 0; i < nx; ++i) {
                const std::size_t f = g_.yface(i, j);
                const double nb = nv[row - nx + i];
                const double nt = nv[row + i];
                const double nf = 0.5 * (nb + nt);
                const double d = d_eps(nf);
                const double w = taxis(taxis_.by[f], nf);
                const double a = u_.uy[f];
                fy_[f] = d * (nt - nb) * ihy - w * (w >= 0.0 ? nb : nt) - a * (a >= 0.0 ? nb : nt);
                const double dc = d * ihy * ihy;
                rate_[row - nx + i] += dc + (std::max(w, 0.0) + std::max(a, 0.0)) * ihy;
                rate_[row + i] += dc + (std::max(-w, 0.0) + std::max(-a, 0.0)) * ihy;
            }
        }
        return *std::max_element(rate_.begin(), rate_.end());
    }

    void apply(ScalarField& n, double dts, double& clamp_mass) const
    {
        const int nx = g_.nx();
        const int ny = g_.ny();
        const double sx = dts / g_.hx();
        const double sy = dts / g_.hy();
        double clamped = 0.0;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double& v = n(i, j);
                v += sx * (fx_[g_.xface(i + 1, j)] - fx_[g_.xface(i, j)]) +
                     sy * (fy_[g_.yface(i, j + 1)] - fy_[g_.yface(i, j)]);
                if (v < 0.0) {
                    clamped -= v;
                    v = 0.0;
                }
            }
        clamp_mass += clamped * g_.cell_area();
    }

    Grid g_;
    const ModelSpec& spec_;
    TaxisCoefficients taxis_;
    const VectorField& u_;
    double safety_;
    double dt_min_;
    bool linear_ = false;
    std::vector<double> fx_;
    std::vector<double> fy_;
    std::vector<double> rate_;
};

bool finite_state(const State& s) { return s.n.all_finite() && s.c.all_finite() && s.u.all_finite(); }

}  // namespace

void validate_controls(const TimeControls& c)
{
    if (!(c.dt_max > 0.0) || !std::isfinite(c.dt_max)) throw std::invalid_argument("dt_max must be positive");
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0,1]");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw std::invalid_argument("t_end must be non-negative");
    if (!(c.n_safety > 0.0 && c.n_safety <= 1.0)) throw std::invalid_argument("n_safety must lie in (0,1]");
    if (!(c.dt_min > 0.0)) throw std::invalid_argument("dt_min must be positive");
    if (!(c.cadence > 0.0)) throw std::invalid_argument("cadence must be positive");
}

double stable_dt(const State& state, const TimeControls& controls)
{
    const Grid& g = state.n.grid;
    double dt = controls.dt_max;
    const double speed = max_abs_field(state.u.ux) / g.hx() + max_abs_field(state.u.uy) / g.hy();
    if (speed > 0.0) dt = std::min(dt, controls.cfl / speed);
    const double lap = 2.0 / (g.hx() * g.hx()) + 2.0 / (g.hy() * g.hy());
    if (controls.c_diffusion == DiffusionMode::Explicit || controls.u_diffusion == DiffusionMode::Explicit)
        dt = std::min(dt, controls.cfl / lap);
    return dt;
}

State step(const State& state, const ModelSpec& spec, const TimeControls& controls, const PoissonSolver& poisson,
           StepInfo* info, double dt_limit)
{
    const Grid& g = state.n.grid;
    const double dt = std::min(stable_dt(state, controls), dt_limit);
    if (!(dt >= controls.dt_min)) throw StabilityError("time step collapsed below dt_min: " + std::to_string(dt));

    State next = state;
    StepInfo local;
    local.dt = dt;

    // (i) density
    DensityStepper density(state.c, state.u, spec, controls.n_safety, controls.dt_min);
    local.substeps = density.advance(next.n, dt, local.clamp_mass);

    // (ii) signal
    {
        const ScalarField adv = advective_derivative(state.c, state.u);
        ScalarField ca = state.c;
        for (std::size_t k = 0; k < ca.values.size(); ++k) ca.values[k] -= dt * adv.values[k];
        ScalarField cb(g);
        if (controls.c_diffusion == DiffusionMode::SemiImplicit) {
            cb = poisson.solve_helmholtz(ca, dt);
        } else {
            const ScalarField l = laplace(ca);
            cb = ca;
            for (std::size_t k = 0; k < cb.values.size(); ++k) cb.values[k] += dt * l.values[k];
        }
        for (std::size_t k = 0; k < cb.values.size(); ++k)
            next.c.values[k] = cb.values[k] / (1.0 + dt * next.n.values[k]);
    }

    // (iii) fluid
    {
        const VectorField adv = advect_velocity(state.u);
        VectorField ua = state.u;
        for (std::size_t k = 0; k < ua.ux.size(); ++k) ua.ux[k] -= dt * adv.ux[k];
        for (std::size_t k = 0; k < ua.uy.size(); ++k) ua.uy[k] -= dt * adv.uy[k];
        ua.zero_normal_boundary();
        VectorField ub(g);
        if (controls.u_diffusion == DiffusionMode::SemiImplicit) {
            ub = poisson.solve_velocity_helmholtz(ua, dt);
        } else {
            const VectorField l = laplace_velocity(ua);
            ub = ua;
            for (std::size_t k = 0; k < ub.ux.size(); ++k) ub.ux[k] += dt * l.ux[k];
            for (std::size_t k = 0; k < ub.uy.size(); ++k) ub.uy[k] += dt * l.uy[k];
        }
        const double px = spec.phi_gradient[0];
        const double py = spec.phi_gradient[1];
        const ScalarField& n = next.n;
        if (px != 0.0)
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 1; i < g.nx(); ++i) ub.x(i, j) += dt * px * 0.5 * (n(i - 1, j) + n(i, j));
        if (py != 0.0)
            for (int j = 1; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i) ub.y(i, j) += dt * py * 0.5 * (n(i, j - 1) + n(i, j));
        next.u = project(ub, poisson).u;
    }

    next.t = state.t + dt;
    if (info != nullptr) *info = local;
    return next;
}

void validate_initial(const State& s, double div_tol)
{
    if (!finite_state(s)) throw std::invalid_argument("initial data must be finite");
    double total = 0.0;
    for (double v : s.n.values) {
        if (v < 0.0) throw std::invalid_argument("initial density must satisfy n0 >= 0");
        total += v;
    }
    if (!(total > 0.0)) throw std::invalid_argument("initial density must satisfy n0 not identically 0");
    for (double v : s.c.values)
        if (!(v > 0.0)) throw std::invalid_argument("initial signal must satisfy c0 > 0");
    const Grid& g = s.u.grid;
    for (int j = 0; j < g.ny(); ++j)
        if (s.u.x(0, j) != 0.0 || s.u.x(g.nx(), j) != 0.0)
            throw std::invalid_argument("initial velocity must vanish on the walls");
    for (int i = 0; i < g.nx(); ++i)
        if (s.u.y(i, 0) != 0.0 || s.u.y(i, g.ny()) != 0.0)
            throw std::invalid_argument("initial velocity must vanish on the walls");
    if (max_abs_div(s.u) > div_tol) throw std::invalid_argument("initial velocity must be discretely solenoidal");
}

RunResult run(const State& initial, const ModelSpec& spec, const TimeControls& controls, const PoissonSolver& poisson,
              const std::vector<Sink>& sinks)
{
    validate_controls(controls);
    validate_initial(initial);
    if (!(initial.n.grid == poisson.grid())) throw std::invalid_argument("Poisson solver built for a different grid");

    RunMonitors mon;
    mon.initial_mass = integrate(initial.n);
    mon.running_n_max = initial.n.max();
    mon.max_div = max_abs_div(initial.u);
    const double c0_min = initial.c.min();

    auto emit = [&](const State& s) {
        for (const auto& sink : sinks) sink(s, mon);
    };

    State state = initial;
    emit(state);
    const double t0 = initial.t;
    const double t_end = controls.t_end;
    long tick = static_cast<long>(std::floor((state.t - t0) / controls.cadence)) + 1;

    while (state.t < t_end) {
        const double t_tick = std::min(t0 + tick * controls.cadence, t_end);
        StepInfo info;
        State next = step(state, spec, controls, poisson, &info, t_tick - state.t);
        const bool on_tick = t_tick - next.t <= 1e-12 * std::max(1.0, std::abs(t_tick));
        if (on_tick) next.t = t_tick;

        if (!finite_state(next))
            throw NumericalBreakdown("non-finite value at t = " + std::to_string(next.t), state);

        ++mon.steps;
        mon.substeps += info.substeps;
        mon.clamp_mass += info.clamp_mass;
        const double mass = integrate(next.n);
        mon.max_mass_drift = std::max(mon.max_mass_drift, std::abs(mass - mon.initial_mass) / mon.initial_mass);
        mon.max_c_max_increase = std::max(mon.max_c_max_increase, next.c.max() - state.c.max());
        mon.running_n_max = std::max(mon.running_n_max, next.n.max());
        const double lower = c0_min * std::exp(-mon.running_n_max * (next.t - t0));
        mon.min_c_lower_ratio = std::min(mon.min_c_lower_ratio, next.c.min() / lower);
        mon.max_div = std::max(mon.max_div, max_abs_div(next.u));

        state = std::move(next);
        if (on_tick) {
            emit(state);
            ++tick;
        }
    }
    return {std::move(state), mon};
}

}  // namespace chemoflow
