#pragma once

#include <functional>
#include <vector>

#include "chemoflow/grid.hpp"
#include "chemoflow/model.hpp"
#include "chemoflow/poisson.hpp"

namespace chemoflow {

// Discrete calculus on the MAC grid. Scalars carry homogeneous Neumann data
// (mirror ghosts, zero flux through walls); face velocities carry no-slip
// data (zero normal component, antisymmetric tangential ghosts).

/// Face differences of a cell field; wall faces are 0.
VectorField grad(const ScalarField& f);

/// Conservative cell divergence of a face field.
ScalarField div(const VectorField& v);

/// div(grad f): the 5-point stencil with mirror ghosts.
ScalarField laplace(const ScalarField& f);

/// Componentwise 5-point Laplacian of a face field under no-slip walls.
/// Boundary-normal entries of the result are 0.
VectorField laplace_velocity(const VectorField& v);

/// div(v f) with first-order upwind face values.
ScalarField advect_scalar(const ScalarField& f, const VectorField& v);

/// Upwind v.grad f, written as advect_scalar(f, v) - f div v. For any v
/// this is a combination of inflow differences, so an explicit update with
/// it is monotone under the CFL rule.
ScalarField advective_derivative(const ScalarField& f, const VectorField& v);

/// Upwind (u.grad)u on interior faces; cross components are 4-point averages.
VectorField advect_velocity(const VectorField& u);

/// div(D_eps(n) grad n) with D_eps at the arithmetic face mean of n.
ScalarField nonlinear_diffuse(const ScalarField& n, const ModelSpec& spec);

/// The n-independent part of the taxis face velocity: rho_eps(face)
/// S0 (c_face+eps)^-gamma (R grad c)_normal. Multiplying by chi_eps of the face
/// mean of n gives the full face velocity w = S_eps grad c.
struct TaxisCoefficients {
    Grid grid;
    std::vector<double> bx;  ///< per x-face
    std::vector<double> by;  ///< per y-face
};

TaxisCoefficients taxis_coefficients(const ScalarField& c, const ModelSpec& spec);

/// Face velocity w = chi_eps(n_face) * base, written into `w`.
void taxis_velocity(const ScalarField& n, const TaxisCoefficients& base, double eps, VectorField& w);

/// div(n S_eps grad c) with n upwinded by the sign of the face velocity.
ScalarField taxis_flux_div(const ScalarField& n, const ScalarField& c, const ModelSpec& spec);
ScalarField taxis_flux_div(const ScalarField& n, const TaxisCoefficients& base, const ModelSpec& spec);

/// Discretely solenoidal field from a stream function sampled at grid nodes:
/// ux = d(psi)/dy, uy = -d(psi)/dx. Wall normals vanish when psi is 0 on the walls.
VectorField velocity_from_stream(const Grid& g, const std::function<double(double, double)>& psi);

struct Projection {
    VectorField u;
    ScalarField p;
};

/// Returns (v_star - grad p, p) with lap p = div v_star and zero-mean p.
Projection project(const VectorField& v_star, const PoissonSolver& solver);

/// Sum over faces of grad(f).v times the cell area; equals -integrate(f div v)
/// for v with zero normal wall entries.
double grad_pairing(const ScalarField& f, const VectorField& v);

/// Sum over faces of v.w times the cell area.
double face_inner(const VectorField& v, const VectorField& w);

}  // namespace chemoflow
