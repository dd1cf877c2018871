#pragma once

#include <memory>
#include <vector>

#include "chemoflow/grid.hpp"

namespace chemoflow {

enum class PoissonMethod { CosineTransform };

/// Fast-diagonalization solver for the constant-coefficient problems of the
/// scheme: the pure-Neumann pressure Poisson equation, the implicit Neumann
/// Helmholtz step for scalars, and the implicit no-slip Helmholtz step for
/// face velocities. Plans are built once; solves are const and reentrant.
class PoissonSolver {
public:
    explicit PoissonSolver(const Grid& grid, double tolerance = 1e-10, int max_iterations = 1);
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    const Grid& grid() const { return grid_; }
    PoissonMethod method() const { return PoissonMethod::CosineTransform; }
    double tolerance() const { return tolerance_; }
    int max_iterations() const { return max_iterations_; }

    /// Solves lap_h p = rhs - mean(rhs) with homogeneous Neumann data and
    /// returns the zero-mean solution. Throws std::runtime_error if the
    /// relative residual exceeds the tolerance.
    ScalarField solve_neumann(const ScalarField& rhs) const;

    /// Solves (I - alpha lap_h) f = rhs with homogeneous Neumann data.
    ScalarField solve_helmholtz(const ScalarField& rhs, double alpha) const;

    /// Solves (I - alpha lap_h) u = rhs componentwise for face velocities with
    /// u = 0 on the walls. Boundary-normal entries of rhs are ignored.
    VectorField solve_velocity_helmholtz(const VectorField& rhs, double alpha) const;

private:
    struct Plans;

    Grid grid_;
    double tolerance_;
    int max_iterations_;
    std::unique_ptr<Plans> plans_;
    std::vector<double> eig_cx_;  // Neumann, cell-centered
    std::vector<double> eig_cy_;
    std::vector<double> eig_dx_;  // Dirichlet at nodes (nx-1 interior points)
    std::vector<double> eig_dy_;
    std::vector<double> eig_sx_;  // Dirichlet half a cell beyond the centers
    std::vector<double> eig_sy_;
};

}  // namespace chemoflow
