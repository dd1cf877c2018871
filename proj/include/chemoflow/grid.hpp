#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chemoflow {

/// Uniform rectangular MAC grid on [0,lx]x[0,ly].
///
/// Scalars live at cell centers ((i+1/2)hx, (j+1/2)hy), x-velocities on
/// x-faces (i*hx, (j+1/2)hy) for i in [0,nx], y-velocities on y-faces
/// ((i+1/2)hx, j*hy) for j in [0,ny]. All storage is row-major with the
/// x index running fastest.
class Grid {
public:
    Grid(int nx, int ny, double lx, double ly);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double cell_area() const { return hx_ * hy_; }
    double area() const { return lx_ * ly_; }

    std::size_t cell_count() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t xface_count() const { return static_cast<std::size_t>(nx_ + 1) * ny_; }
    std::size_t yface_count() const { return static_cast<std::size_t>(nx_) * (ny_ + 1); }

    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    std::size_t xface(int i, int j) const { return static_cast<std::size_t>(j) * (nx_ + 1) + i; }
    std::size_t yface(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    double xc(int i) const { return (i + 0.5) * hx_; }
    double yc(int j) const { return (j + 0.5) * hy_; }
    double xn(int i) const { return i * hx_; }
    double yn(int j) const { return j * hy_; }

    /// Mirror index for homogeneous Neumann ghost cells (any depth).
    int reflect_x(int i) const;
    int reflect_y(int j) const;

    /// Distance from (x,y) to the nearest wall.
    double wall_distance(double x, double y) const;

    bool operator==(const Grid& other) const = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
    double hx_;
    double hy_;
};

Grid make_grid(int nx, int ny, double lx, double ly);

/// Cell-centered scalar field.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    explicit ScalarField(const Grid& g, double fill = 0.0);

    double& operator()(int i, int j) { return values[grid.cell(i, j)]; }
    double operator()(int i, int j) const { return values[grid.cell(i, j)]; }

    /// Value with Neumann mirror extension outside the domain.
    double ghosted(int i, int j) const { return values[grid.cell(grid.reflect_x(i), grid.reflect_y(j))]; }

    double max() const;
    double min() const;
    bool all_finite() const;
};

/// Face-centered vector field. Boundary-normal entries (ux at i=0,nx and
/// uy at j=0,ny) are kept at exactly zero.
struct VectorField {
    Grid grid;
    std::vector<double> ux;
    std::vector<double> uy;

    explicit VectorField(const Grid& g);

    double& x(int i, int j) { return ux[grid.xface(i, j)]; }
    double x(int i, int j) const { return ux[grid.xface(i, j)]; }
    double& y(int i, int j) { return uy[grid.yface(i, j)]; }
    double y(int i, int j) const { return uy[grid.yface(i, j)]; }

    void zero_normal_boundary();
    double max_abs() const;
    bool all_finite() const;
};

struct State {
    ScalarField n;
    ScalarField c;
    VectorField u;
    double t = 0.0;

    explicit State(const Grid& g) : n(g), c(g, 1.0), u(g) {}
};

/// Midpoint rule: sum of f_ij * hx * hy.
double integrate(const ScalarField& f);

/// Midpoint rule over a raw cell array laid out on `g`.
double integrate(const Grid& g, std::span<const double> values);

ScalarField sample(const Grid& g, auto&& fn)
{
    ScalarField f(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            f(i, j) = fn(g.xc(i), g.yc(j));
    return f;
}

}  // namespace chemoflow
