#include "chemoflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chemoflow {

Grid::Grid(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), hx_(0.0), hy_(0.0)
{
    if (!std::isfinite(lx) || !std::isfinite(ly))
        throw std::invalid_argument("grid extents must be finite");
    if (nx < 4 || ny < 4)
        throw std::invalid_argument("grid too small: need nx, ny >= 4");
    if (!(lx > 0.0) || !(ly > 0.0))
        throw std::invalid_argument("grid extents must be positive");
    hx_ = lx / nx;
    hy_ = ly / ny;
}

int Grid::reflect_x(int i) const
{
    while (i < 0 || i >= nx_) {
        if (i < 0) i = -1 - i;
        if (i >= nx_) i = 2 * nx_ - 1 - i;
    }
    return i;
}

int Grid::reflect_y(int j) const
{
    while (j < 0 || j >= ny_) {
        if (j < 0) j = -1 - j;
        if (j >= ny_) j = 2 * ny_ - 1 - j;
    }
    return j;
}

double Grid::wall_distance(double x, double y) const
{
    return std::min({x, lx_ - x, y, ly_ - y});
}

Grid make_grid(int nx, int ny, double lx, double ly) { return Grid(nx, ny, lx, ly); }

ScalarField::ScalarField(const Grid& g, double fill) : grid(g), values(g.cell_count(), fill) {}

double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }

bool ScalarField::all_finite() const
{
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

VectorField::VectorField(const Grid& g) : grid(g), ux(g.xface_count(), 0.0), uy(g.yface_count(), 0.0) {}

void VectorField::zero_normal_boundary()
{
    for (int j = 0; j < grid.ny(); ++j) {
        x(0, j) = 0.0;
        x(grid.nx(), j) = 0.0;
    }
    for (int i = 0; i < grid.nx(); ++i) {
        y(i, 0) = 0.0;
        y(i, grid.ny()) = 0.0;
    }
}

double VectorField::max_abs() const
{
    double m = 0.0;
    for (double v : ux) m = std::max(m, std::abs(v));
    for (double v : uy) m = std::max(m, std::abs(v));
    return m;
}

bool VectorField::all_finite() const
{
    auto fin = [](double v) { return std::isfinite(v); };
    return std::all_of(ux.begin(), ux.end(), fin) && std::all_of(uy.begin(), uy.end(), fin);
}

double integrate(const Grid& g, std::span<const double> values)
{
    // Neumaier-compensated sum.
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return (sum + comp) * g.cell_area();
}

double integrate(const ScalarField& f) { return integrate(f.grid, f.values); }

}  // namespace chemoflow
