#include "chemoflow/poisson.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "chemoflow/operators.hpp"

namespace chemoflow {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

class Buffer {
public:
    explicit Buffer(std::size_t n) : data_(fftw_alloc_real(n == 0 ? 1 : n)), size_(n)
    {
        if (data_ == nullptr) throw std::bad_alloc();
    }
    ~Buffer() { fftw_free(data_); }
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;

    double* data() { return data_; }
    double& operator[](std::size_t k) { return data_[k]; }
    std::size_t size() const { return size_; }

private:
    double* data_;
    std::size_t size_;
};

// In-place 2D real-to-real plan pair. Rows are indexed by y, columns by x.
struct TransformPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    int rows = 0;
    int cols = 0;
    double scale = 1.0;

    void create(int r, int c, fftw_r2r_kind fy, fftw_r2r_kind fx, fftw_r2r_kind iy, fftw_r2r_kind ix, double norm)
    {
        rows = r;
        cols = c;
        scale = 1.0 / norm;
        Buffer scratch(static_cast<std::size_t>(r) * c);
        forward = fftw_plan_r2r_2d(r, c, scratch.data(), scratch.data(), fy, fx, FFTW_ESTIMATE);
        inverse = fftw_plan_r2r_2d(r, c, scratch.data(), scratch.data(), iy, ix, FFTW_ESTIMATE);
        if (forward == nullptr || inverse == nullptr) throw std::runtime_error("FFTW planning failed");
    }

    void destroy()
    {
        if (forward != nullptr) fftw_destroy_plan(forward);
        if (inverse != nullptr) fftw_destroy_plan(inverse);
        forward = inverse = nullptr;
    }
};

double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> cosine_eigenvalues(int n, double h, int shift)
{
    std::vector<double> e(n);
    for (int k = 0; k < n; ++k)
        e[k] = (2.0 - 2.0 * std::cos(std::numbers::pi * (k + shift) / n)) / (h * h);
    return e;
}

std::vector<double> node_eigenvalues(int n, double h)
{
    std::vector<double> e(n - 1);
    for (int k = 0; k < n - 1; ++k)
        e[k] = (2.0 - 2.0 * std::cos(std::numbers::pi * (k + 1) / n)) / (h * h);
    return e;
}

}  // namespace

struct PoissonSolver::Plans {
    TransformPair cell;
    TransformPair xface;
    TransformPair yface;

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        cell.destroy();
        xface.destroy();
        yface.destroy();
    }
};

PoissonSolver::PoissonSolver(const Grid& grid, double tolerance, int max_iterations)
    : grid_(grid), tolerance_(tolerance), max_iterations_(max_iterations), plans_(std::make_unique<Plans>())
{
    if (!(tolerance > 0.0)) throw std::invalid_argument("Poisson tolerance must be positive");
    const int nx = grid.nx();
    const int ny = grid.ny();
    {
        std::lock_guard lock(planner_mutex());
        plans_->cell.create(ny, nx, FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT01, FFTW_REDFT01, 4.0 * nx * ny);
        plans_->xface.create(ny, nx - 1, FFTW_RODFT10, FFTW_RODFT00, FFTW_RODFT01, FFTW_RODFT00, 4.0 * nx * ny);
        plans_->yface.create(ny - 1, nx, FFTW_RODFT00, FFTW_RODFT10, FFTW_RODFT00, FFTW_RODFT01, 4.0 * nx * ny);
    }
    eig_cx_ = cosine_eigenvalues(nx, grid.hx(), 0);
    eig_cy_ = cosine_eigenvalues(ny, grid.hy(), 0);
    eig_sx_ = cosine_eigenvalues(nx, grid.hx(), 1);
    eig_sy_ = cosine_eigenvalues(ny, grid.hy(), 1);
    eig_dx_ = node_eigenvalues(nx, grid.hx());
    eig_dy_ = node_eigenvalues(ny, grid.hy());
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

ScalarField PoissonSolver::solve_neumann(const ScalarField& rhs) const
{
    if (!(rhs.grid == grid_)) throw std::invalid_argument("Poisson rhs lives on a different grid");
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    const std::size_t count = grid_.cell_count();

    double mean = 0.0;
    for (double v : rhs.values) mean += v;
    mean /= static_cast<double>(count);

    ScalarField compatible(grid_);
    for (std::size_t k = 0; k < count; ++k) compatible.values[k] = rhs.values[k] - mean;
    const double rhs_norm = norm2(compatible.values);
    ScalarField p(grid_);
    if (rhs_norm == 0.0) return p;

    Buffer buf(count);
    for (std::size_t k = 0; k < count; ++k) buf[k] = compatible.values[k];
    const auto& t = plans_->cell;
    fftw_execute_r2r(t.forward, buf.data(), buf.data());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = grid_.cell(i, j);
            const double lam = eig_cx_[i] + eig_cy_[j];
            buf[k] = (i == 0 && j == 0) ? 0.0 : -buf[k] / lam * t.scale;
        }
    fftw_execute_r2r(t.inverse, buf.data(), buf.data());

    double pmean = 0.0;
    for (std::size_t k = 0; k < count; ++k) pmean += buf[k];
    pmean /= static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) p.values[k] = buf[k] - pmean;

    const ScalarField lap = laplace(p);
    std::vector<double> r(count);
    for (std::size_t k = 0; k < count; ++k) r[k] = lap.values[k] - compatible.values[k];
    const double rel = norm2(r) / rhs_norm;
    if (!(rel <= tolerance_))
        throw std::runtime_error("Poisson solve did not reach tolerance: relative residual " + std::to_string(rel));
    return p;
}

ScalarField PoissonSolver::solve_helmholtz(const ScalarField& rhs, double alpha) const
{
    if (!(rhs.grid == grid_)) throw std::invalid_argument("Helmholtz rhs lives on a different grid");
    if (!(alpha >= 0.0)) throw std::invalid_argument("Helmholtz coefficient must be non-negative");
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    const std::size_t count = grid_.cell_count();

    Buffer buf(count);
    for (std::size_t k = 0; k < count; ++k) buf[k] = rhs.values[k];
    const auto& t = plans_->cell;
    fftw_execute_r2r(t.forward, buf.data(), buf.data());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = grid_.cell(i, j);
            buf[k] *= t.scale / (1.0 + alpha * (eig_cx_[i] + eig_cy_[j]));
        }
    fftw_execute_r2r(t.inverse, buf.data(), buf.data());

    ScalarField f(grid_);
    for (std::size_t k = 0; k < count; ++k) f.values[k] = buf[k];

    const double rhs_norm = norm2(rhs.values);
    if (rhs_norm > 0.0) {
        const ScalarField lap = laplace(f);
        std::vector<double> r(count);
        for (std::size_t k = 0; k < count; ++k) r[k] = f.values[k] - alpha * lap.values[k] - rhs.values[k];
        const double rel = norm2(r) / rhs_norm;
        if (!(rel <= tolerance_))
            throw std::runtime_error("Helmholtz solve did not reach tolerance: relative residual " +
                                     std::to_string(rel));
    }
    return f;
}

VectorField PoissonSolver::solve_velocity_helmholtz(const VectorField& rhs, double alpha) const
{
    if (!(rhs.grid == grid_)) throw std::invalid_argument("Helmholtz rhs lives on a different grid");
    if (!(alpha >= 0.0)) throw std::invalid_argument("Helmholtz coefficient must be non-negative");
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    VectorField u(grid_);

    {
        const auto& t = plans_->xface;
        Buffer buf(static_cast<std::size_t>(ny) * (nx - 1));
        auto at = [&](int i, int j) -> double& { return buf[static_cast<std::size_t>(j) * (nx - 1) + (i - 1)]; };
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) at(i, j) = rhs.x(i, j);
        fftw_execute_r2r(t.forward, buf.data(), buf.data());
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) at(i, j) *= t.scale / (1.0 + alpha * (eig_dx_[i - 1] + eig_sy_[j]));
        fftw_execute_r2r(t.inverse, buf.data(), buf.data());
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) u.x(i, j) = at(i, j);
    }
    {
        const auto& t = plans_->yface;
        Buffer buf(static_cast<std::size_t>(ny - 1) * nx);
        auto at = [&](int i, int j) -> double& { return buf[static_cast<std::size_t>(j - 1) * nx + i]; };
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) at(i, j) = rhs.y(i, j);
        fftw_execute_r2r(t.forward, buf.data(), buf.data());
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) at(i, j) *= t.scale / (1.0 + alpha * (eig_sx_[i] + eig_dy_[j - 1]));
        fftw_execute_r2r(t.inverse, buf.data(), buf.data());
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) u.y(i, j) = at(i, j);
    }

    VectorField clean = rhs;
    clean.zero_normal_boundary();
    double rhs_norm2 = 0.0;
    for (double v : clean.ux) rhs_norm2 += v * v;
    for (double v : clean.uy) rhs_norm2 += v * v;
    if (rhs_norm2 > 0.0) {
        const VectorField lap = laplace_velocity(u);
        double r2 = 0.0;
        for (std::size_t k = 0; k < u.ux.size(); ++k) {
            const double r = u.ux[k] - alpha * lap.ux[k] - clean.ux[k];
            r2 += r * r;
        }
        for (std::size_t k = 0; k < u.uy.size(); ++k) {
            const double r = u.uy[k] - alpha * lap.uy[k] - clean.uy[k];
            r2 += r * r;
        }
        const double rel = std::sqrt(r2 / rhs_norm2);
        if (!(rel <= tolerance_))
            throw std::runtime_error("velocity Helmholtz solve did not reach tolerance: relative residual " +
                                     std::to_string(rel));
    }
    return u;
}

}  // namespace chemoflow
