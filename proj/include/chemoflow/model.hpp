#pragma once

#include <array>
#include <variant>
#include <vector>

#include "chemoflow/grid.hpp"

namespace chemoflow {

/// D(n) = n^(m-1).
struct PorousMedium {
    double m = 2.0;
};

/// Piecewise-linear D through (knots[k], values[k]); constant beyond the last knot.
struct Tabulated {
    std::vector<double> knots;
    std::vector<double> values;
};

using Diffusion = std::variant<PorousMedium, Tabulated>;

enum class SensitivityKind { Isotropic, Rotation };

struct ModelSpec {
    Diffusion diffusion = PorousMedium{2.0};
    double gamma = 0.5;
    /// Constant S0 in |S| <= S0 / c^gamma.
    double s0_sensitivity = 1.0;
    SensitivityKind sensitivity_kind = SensitivityKind::Isotropic;
    double theta = 0.0;
    std::array<double, 2> phi_gradient{0.0, -1.0};
    double epsilon = 0.05;
    /// Diffusion threshold: D(n) >= L must hold for all large n.
    double L = 1.0;
    /// Bound on ||c0||_inf (and ||n0||_1 when gamma > 1/2).
    double M = 1.5;
};

/// Throws std::invalid_argument on a malformed spec (gamma range, epsilon
/// range, negative S0, non-increasing or non-positive tabulated data).
void validate_model(const ModelSpec& spec);

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    std::array<double, 2> apply(double x, double y) const { return {a11 * x + a12 * y, a21 * x + a22 * y}; }
};

/// Largest singular value.
double spectral_norm(const Mat2& m);

double eval_D(double n, const ModelSpec& spec);
double eval_D_eps(double n, const ModelSpec& spec);

struct DiffusionPrimitives {
    double d1 = 0.0;  ///< int_0^n D_eps
    double d2 = 0.0;  ///< int_0^n D1
};

/// Closed form for porous-medium diffusion, adaptive Simpson for tabulated
/// data. Throws std::runtime_error if the quadrature does not converge.
DiffusionPrimitives eval_D_primitives(double n, const ModelSpec& spec);

/// Boundary cutoff: 0 within eps of the wall, 1 beyond 2 eps, smoothstep between.
double rho_eps(double wall_distance, double eps);

/// Density cutoff: 1 on [0,1/eps], 0 on [2/eps,inf), smoothstep between.
double chi_eps(double n, double eps);

/// Unregularized scalar prototype S0 / c^gamma.
double sensitivity_magnitude(double c, const ModelSpec& spec);

/// Orientation part of S: identity or rotation by theta.
Mat2 sensitivity_orientation(const ModelSpec& spec);

/// S_eps(x,n,c) = rho_eps(x) chi_eps(n) S(x,n,c+eps).
Mat2 eval_S_eps(double wall_distance, double n, double c, const ModelSpec& spec);
Mat2 eval_S_eps(const Grid& domain, double x, double y, double n, double c, const ModelSpec& spec);

/// Smallest s0 with D(s) >= L for all s >= s0; a table that is >= L
/// everywhere yields its first interior knot so that s0 stays positive.
/// Throws std::domain_error ("L unreachable") when D never exceeds L.
double threshold_s0(const ModelSpec& spec);

/// inf_{n in (0, 2 s0)} D(n)/n. Throws std::domain_error ("degenerate near
/// zero") when the infimum vanishes.
double kappa_of(double s0, const ModelSpec& spec);

/// Sampled Psi0, Psi1, Psi2 on [0, 2 s0] with linear interpolation.
class TruncationTable {
public:
    static constexpr int kSamples = 4096;

    TruncationTable(const ModelSpec& spec, double s0);

    double s0() const { return s0_; }
    double kappa() const { return kappa_; }
    double psi0(double s) const;
    double psi1(double s) const;
    double psi2(double s) const;
    /// Upper bound 3 s0 / kappa on Psi2.
    double psi2_bound() const { return 3.0 * s0_ / kappa_; }

private:
    double interpolate(const std::vector<double>& table, double s) const;

    double s0_;
    double kappa_;
    double ds_;
    double d_eps_s0_;
    std::vector<double> psi0_;
    std::vector<double> psi1_;
    std::vector<double> psi2_;
    ModelSpec spec_;
};

TruncationTable build_truncations(const ModelSpec& spec, double s0);

}  // namespace chemoflow
