#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chemoflow/grid.hpp"
#include "chemoflow/model.hpp"

namespace chemoflow {

/// Weights of the energy-like functionals F and G plus the measured (mu, Gamma).
struct EnergyCoefficients {
    double b1 = 1.0;
    double b2 = 1.0;
    double b3 = 1.0;
    double bhat2 = 1.0;
    double bhat3 = 1.0;
    double s0 = 1.0;
    double kappa = 1.0;
    double delta = kDelta;
    double mu = 1.0;
    double Gamma = 1.0;
    /// Exponent of the weighted signal integral |grad c|^2 / c^(2-q).
    double q = 0.5;

    static constexpr double kDelta = 1.0 / ((5.0 + 1.4142135623730951) * (5.0 + 1.4142135623730951));
};

/// Default weights with s0 and kappa derived from the diffusion.
EnergyCoefficients make_coefficients(const ModelSpec& spec);

/// Throws std::invalid_argument unless every entry is strictly positive
/// and delta is 1/(5+sqrt 2)^2.
void validate_coefficients(const EnergyCoefficients& coeffs);

struct DiagnosticsRecord {
    double t = 0.0;
    double mass_n = 0.0;
    double c_max = 0.0;
    double c_min = 0.0;
    double n_max = 0.0;
    double div_u_max = 0.0;
    double E_u = 0.0;
    double enstrophy = 0.0;
    double I_logn = 0.0;
    double I_D2grad = 0.0;
    double I_Dlog = 0.0;
    double I_c4 = 0.0;
    double I_c6 = 0.0;
    double I_mix = 0.0;
    double I_cq = 0.0;
    double F = 0.0;
    double G = 0.0;
    double clamp_mass = 0.0;
    /// Not part of the time-series schema: components of F and G.
    double I_nc = 0.0;    ///< int n |grad c|^2 / c
    double I_D2 = 0.0;    ///< int D2_eps(n)
    double I_psi2 = 0.0;  ///< int Psi2(n)

    bool operator==(const DiagnosticsRecord&) const = default;
};

/// Names and accessors of the CSV columns, in schema order.
struct RecordColumn {
    const char* name;
    double DiagnosticsRecord::*field;
};
const std::vector<RecordColumn>& record_columns();

/// Cell-centred |grad f|^2: mean of the two squared face differences per direction.
ScalarField grad_squared(const ScalarField& f);

/// Every monitored integral of a state. `clamp_mass` is passed through.
DiagnosticsRecord record(const State& state, const ModelSpec& spec, const EnergyCoefficients& coeffs,
                         const TruncationTable& table, double clamp_mass = 0.0);

enum class Functional { F, G };

/// F for gamma <= 1/2; G for gamma in (1/2, 5/6], which also needs ||n0||_1 <= M.
/// Throws std::invalid_argument outside these hypotheses.
Functional select_functional(const ModelSpec& spec, double n0_l1);

double functional_value(const DiagnosticsRecord& r, Functional which);

struct EnvelopeReport {
    Functional which = Functional::F;
    std::size_t intervals = 0;
    /// The supplied (mu, Gamma): fraction of non-positive residuals and envelope check.
    double given_fraction = 0.0;
    bool given_envelope_ok = false;
    /// Tightest feasible grid pair, if any.
    bool feasible = false;
    double mu = 0.0;
    double Gamma = 0.0;
    double fraction = 0.0;
    double bound = 0.0;  ///< max(F(0), Gamma/mu)
    bool envelope_ok = false;
    double max_value = 0.0;

    bool satisfied() const { return feasible && envelope_ok; }
};

/// Discrete residual r_k = (F_{k+1}-F_k)/dt_k + mu (F_k + I_c6_k) - Gamma.
std::vector<double> envelope_residuals(const std::vector<DiagnosticsRecord>& series, Functional which, double mu,
                                       double Gamma);

/// Grid search over mu = 10^((k-10)/5), Gamma = S 10^((l-8)/2), k,l in [0,20),
/// with S = max(F(0), 1e-12). A pair is feasible when at least `quantile` of
/// the residuals are non-positive; the tightest feasible pair minimizes
/// max(F(0), Gamma/mu), ties broken by the larger mu. Throws on an empty series.
EnvelopeReport functional_envelope(const std::vector<DiagnosticsRecord>& series, const EnergyCoefficients& coeffs,
                                   Functional which = Functional::F, double quantile = 0.99, double tol = 1e-9);

/// Trapezoid averages of `value` over [t_k, t_k + window] for every record
/// time t_k with t_k + window <= t_last. Returns (t_k, average) pairs.
std::vector<std::pair<double, double>> window_averages(const std::vector<DiagnosticsRecord>& series,
                                                       double DiagnosticsRecord::*field, double window = 1.0);

/// Relative growth of the running maximum of (t, v) samples restricted to
/// t >= t_from, measured against the first such sample.
double running_max_growth(const std::vector<std::pair<double, double>>& samples, double t_from);

}  // namespace chemoflow
