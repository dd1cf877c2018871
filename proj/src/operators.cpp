#include "chemoflow/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace chemoflow {

namespace {

void require_same(const Grid& a, const Grid& b)
{
    if (!(a == b)) throw std::invalid_argument("operands live on different grids");
}

double upwind(double vel, double left, double right) { return vel >= 0.0 ? left : right; }

}  // namespace

VectorField grad(const ScalarField& f)
{
    const Grid& g = f.grid;
    VectorField v(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) v.x(i, j) = (f(i, j) - f(i - 1, j)) * ihx;
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) v.y(i, j) = (f(i, j) - f(i, j - 1)) * ihy;
    return v;
}

ScalarField div(const VectorField& v)
{
    const Grid& g = v.grid;
    ScalarField d(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            d(i, j) = (v.x(i + 1, j) - v.x(i, j)) * ihx + (v.y(i, j + 1) - v.y(i, j)) * ihy;
    return d;
}

ScalarField laplace(const ScalarField& f) { return div(grad(f)); }

VectorField laplace_velocity(const VectorField& v)
{
    const Grid& g = v.grid;
    const int nx = g.nx();
    const int ny = g.ny();
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    VectorField out(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double c = v.x(i, j);
            const double s = j > 0 ? v.x(i, j - 1) : -c;
            const double n = j < ny - 1 ? v.x(i, j + 1) : -c;
            out.x(i, j) = (v.x(i + 1, j) - 2.0 * c + v.x(i - 1, j)) * ihx2 + (n - 2.0 * c + s) * ihy2;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double c = v.y(i, j);
            const double w = i > 0 ? v.y(i - 1, j) : -c;
            const double e = i < nx - 1 ? v.y(i + 1, j) : -c;
            out.y(i, j) = (e - 2.0 * c + w) * ihx2 + (v.y(i, j + 1) - 2.0 * c + v.y(i, j - 1)) * ihy2;
        }
    return out;
}

ScalarField advect_scalar(const ScalarField& f, const VectorField& v)
{
    require_same(f.grid, v.grid);
    const Grid& g = f.grid;
    VectorField flux(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) {
            const double u = v.x(i, j);
            flux.x(i, j) = u * upwind(u, f(i - 1, j), f(i, j));
        }
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double u = v.y(i, j);
            flux.y(i, j) = u * upwind(u, f(i, j - 1), f(i, j));
        }
    return div(flux);
}

ScalarField advective_derivative(const ScalarField& f, const VectorField& v)
{
    require_same(f.grid, v.grid);
    const Grid& g = f.grid;
    ScalarField out(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    const int nx = g.nx();
    const int ny = g.ny();
    // Only inflow faces contribute: u_face (f_upwind - f_cell).
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double fc = f(i, j);
            double acc = 0.0;
            const double ul = i > 0 ? v.x(i, j) : 0.0;
            const double ur = i < nx - 1 ? v.x(i + 1, j) : 0.0;
            const double ub = j > 0 ? v.y(i, j) : 0.0;
            const double ut = j < ny - 1 ? v.y(i, j + 1) : 0.0;
            if (ul > 0.0) acc += ul * (fc - f(i - 1, j)) * ihx;
            if (ur < 0.0) acc += ur * (f(i + 1, j) - fc) * ihx;
            if (ub > 0.0) acc += ub * (fc - f(i, j - 1)) * ihy;
            if (ut < 0.0) acc += ut * (f(i, j + 1) - fc) * ihy;
            out(i, j) = acc;
        }
    return out;
}

VectorField advect_velocity(const VectorField& u)
{
    const Grid& g = u.grid;
    const int nx = g.nx();
    const int ny = g.ny();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    VectorField out(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double a = u.x(i, j);
            const double b = 0.25 * (u.y(i - 1, j) + u.y(i, j) + u.y(i - 1, j + 1) + u.y(i, j + 1));
            const double s = j > 0 ? u.x(i, j - 1) : -a;
            const double n = j < ny - 1 ? u.x(i, j + 1) : -a;
            const double dx = a >= 0.0 ? (a - u.x(i - 1, j)) * ihx : (u.x(i + 1, j) - a) * ihx;
            const double dy = b >= 0.0 ? (a - s) * ihy : (n - a) * ihy;
            out.x(i, j) = a * dx + b * dy;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double b = u.y(i, j);
            const double a = 0.25 * (u.x(i, j - 1) + u.x(i + 1, j - 1) + u.x(i, j) + u.x(i + 1, j));
            const double w = i > 0 ? u.y(i - 1, j) : -b;
            const double e = i < nx - 1 ? u.y(i + 1, j) : -b;
            const double dx = a >= 0.0 ? (b - w) * ihx : (e - b) * ihx;
            const double dy = b >= 0.0 ? (b - u.y(i, j - 1)) * ihy : (u.y(i, j + 1) - b) * ihy;
            out.y(i, j) = a * dx + b * dy;
        }
    return out;
}

ScalarField nonlinear_diffuse(const ScalarField& n, const ModelSpec& spec)
{
    const Grid& g = n.grid;
    VectorField flux(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) {
            const double a = n(i - 1, j);
            const double b = n(i, j);
            flux.x(i, j) = eval_D_eps(0.5 * (a + b), spec) * (b - a) * ihx;
        }
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double a = n(i, j - 1);
            const double b = n(i, j);
            flux.y(i, j) = eval_D_eps(0.5 * (a + b), spec) * (b - a) * ihy;
        }
    return div(flux);
}

TaxisCoefficients taxis_coefficients(const ScalarField& c, const ModelSpec& spec)
{
    const Grid& g = c.grid;
    const int nx = g.nx();
    const int ny = g.ny();
    const double eps = spec.epsilon;
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    const Mat2 r = sensitivity_orientation(spec);
    const bool rotated = r.a12 != 0.0 || r.a21 != 0.0;

    TaxisCoefficients t{g, std::vector<double>(g.xface_count(), 0.0), std::vector<double>(g.yface_count(), 0.0)};
    if (spec.s0_sensitivity == 0.0) return t;

    // Centered cell differences, used only for the tangential component.
    auto cdy = [&](int i, int j) { return (c.ghosted(i, j + 1) - c.ghosted(i, j - 1)) * 0.5 * ihy; };
    auto cdx = [&](int i, int j) { return (c.ghosted(i + 1, j) - c.ghosted(i - 1, j)) * 0.5 * ihx; };

    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double rho = rho_eps(g.wall_distance(g.xn(i), g.yc(j)), eps);
            if (rho == 0.0) continue;
            const double gx = (c(i, j) - c(i - 1, j)) * ihx;
            double normal = r.a11 * gx;
            if (rotated) normal += r.a12 * 0.5 * (cdy(i - 1, j) + cdy(i, j));
            const double cf = 0.5 * (c(i - 1, j) + c(i, j));
            t.bx[g.xface(i, j)] = rho * sensitivity_magnitude(cf + eps, spec) * normal;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double rho = rho_eps(g.wall_distance(g.xc(i), g.yn(j)), eps);
            if (rho == 0.0) continue;
            const double gy = (c(i, j) - c(i, j - 1)) * ihy;
            double normal = r.a22 * gy;
            if (rotated) normal += r.a21 * 0.5 * (cdx(i, j - 1) + cdx(i, j));
            const double cf = 0.5 * (c(i, j - 1) + c(i, j));
            t.by[g.yface(i, j)] = rho * sensitivity_magnitude(cf + eps, spec) * normal;
        }
    return t;
}

void taxis_velocity(const ScalarField& n, const TaxisCoefficients& base, double eps, VectorField& w)
{
    const Grid& g = n.grid;
    const double cutoff = 1.0 / eps;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) {
            const double b = base.bx[g.xface(i, j)];
            if (b == 0.0) {
                w.x(i, j) = 0.0;
                continue;
            }
            const double nf = 0.5 * (n(i - 1, j) + n(i, j));
            w.x(i, j) = nf <= cutoff ? b : chi_eps(nf, eps) * b;
        }
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double b = base.by[g.yface(i, j)];
            if (b == 0.0) {
                w.y(i, j) = 0.0;
                continue;
            }
            const double nf = 0.5 * (n(i, j - 1) + n(i, j));
            w.y(i, j) = nf <= cutoff ? b : chi_eps(nf, eps) * b;
        }
}

ScalarField taxis_flux_div(const ScalarField& n, const TaxisCoefficients& base, const ModelSpec& spec)
{
    require_same(n.grid, base.grid);
    VectorField w(n.grid);
    taxis_velocity(n, base, spec.epsilon, w);
    return advect_scalar(n, w);
}

ScalarField taxis_flux_div(const ScalarField& n, const ScalarField& c, const ModelSpec& spec)
{
    require_same(n.grid, c.grid);
    return taxis_flux_div(n, taxis_coefficients(c, spec), spec);
}

VectorField velocity_from_stream(const Grid& g, const std::function<double(double, double)>& psi)
{
    std::vector<double> nodes(static_cast<std::size_t>(g.nx() + 1) * (g.ny() + 1));
    auto at = [&](int i, int j) -> double& { return nodes[static_cast<std::size_t>(j) * (g.nx() + 1) + i]; };
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i) at(i, j) = psi(g.xn(i), g.yn(j));
    VectorField v(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i) v.x(i, j) = (at(i, j + 1) - at(i, j)) / g.hy();
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) v.y(i, j) = -(at(i + 1, j) - at(i, j)) / g.hx();
    return v;
}

Projection project(const VectorField& v_star, const PoissonSolver& solver)
{
    require_same(v_star.grid, solver.grid());
    VectorField start = v_star;
    start.zero_normal_boundary();
    Projection out{start, solver.solve_neumann(div(start))};
    const VectorField gp = grad(out.p);
    for (std::size_t k = 0; k < gp.ux.size(); ++k) out.u.ux[k] -= gp.ux[k];
    for (std::size_t k = 0; k < gp.uy.size(); ++k) out.u.uy[k] -= gp.uy[k];
    return out;
}

double face_inner(const VectorField& v, const VectorField& w)
{
    require_same(v.grid, w.grid);
    double s = 0.0;
    for (std::size_t k = 0; k < v.ux.size(); ++k) s += v.ux[k] * w.ux[k];
    for (std::size_t k = 0; k < v.uy.size(); ++k) s += v.uy[k] * w.uy[k];
    return s * v.grid.cell_area();
}

double grad_pairing(const ScalarField& f, const VectorField& v) { return face_inner(grad(f), v); }

}  // namespace chemoflow
