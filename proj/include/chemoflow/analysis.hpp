#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chemoflow/grid.hpp"

namespace chemoflow {

/// Reproducible positive fields for the functional-inequality checks.
///
/// Member k is built from seed `base_seed + k`: a cosine series
/// sum a_kl cos(k pi x/lx) cos(l pi y/ly) with a_kl ~ N(0,1)/(1+k^2+l^2),
/// which satisfies the no-flux condition exactly. `phi` is the series
/// shifted so that its minimum equals `floor + offset` (offset uniform in
/// [0,1)); `psi` is an independent series plus a constant uniform in [-2,2].
struct CorpusMember {
    std::uint64_t seed = 0;
    ScalarField phi;
    ScalarField psi;
};

struct FieldCorpus {
    Grid grid;
    double floor = 0.1;
    std::vector<CorpusMember> members;
};

FieldCorpus make_corpus(const Grid& g, int count, std::uint64_t base_seed, double floor = 0.1, int modes = 6,
                        double amplitude = 2.0);

struct LogHessianResult {
    double res_identity = 0.0;
    double gap_est1 = 0.0;
    double gap_est2 = 0.0;
};

/// Pointwise identity |D^2 phi|^2 = phi^2 |D^2 ln phi|^2 + grad|grad phi|^2 . grad phi / phi
/// - |grad phi|^4 / phi^2 with centred differences, max-norm residual over
/// cells at least two away from the wall. The two integral estimates use all
/// cells with mirror ghosts; the gaps are RHS - LHS.
LogHessianResult log_hessian_identity_residual(const ScalarField& phi);

/// An inequality lhs <= rest + K coef that is affine in its constant K.
struct GapTerms {
    double lhs = 0.0;
    double rest = 0.0;
    double coef = 0.0;

    double gap(double K) const { return rest + K * coef - lhs; }
    double rhs_scale(double K) const;
    /// Smallest K that closes the gap (coef > 0).
    double needed() const { return (lhs - rest) / coef; }
};

GapTerms trudinger_terms(const ScalarField& phi, const ScalarField& psi, double a, double eta);
double trudinger_gap(const ScalarField& phi, const ScalarField& psi, double a, double eta, double K);

GapTerms trudinger_sublevel_terms(const ScalarField& phi, double L, double s0_tilde,
                                  const std::function<double(double)>& D_tilde, double eta);
double trudinger_sublevel_gap(const ScalarField& phi, double L, double s0_tilde,
                              const std::function<double(double)>& D_tilde, double eta, double K);

/// Throws std::invalid_argument on an empty mask, |B| < varpi or p < 1.
GapTerms poincare_subset_terms(const ScalarField& phi, const std::vector<char>& B_mask, double p, double varpi);
double poincare_subset_gap(const ScalarField& phi, const std::vector<char>& B_mask, double p, double C,
                           double varpi);

/// e^{-a t} y0 + b tau / (1 - e^{-a tau}).
double ode_envelope(double y0, double a, double b, double tau, double t);

struct OdeSweepResult {
    int trials = 0;
    int violations = 0;
    /// min over sampled times of (bound - y) / bound.
    double worst_margin = 0.0;
};

/// Random non-negative piecewise-constant h rescaled so every window
/// integral over length tau is <= b tau; y' + a y = h integrated exactly.
OdeSweepResult ode_envelope_sweep(int trials, std::uint64_t seed, double horizon = 20.0);

struct MkResult {
    double liminf_est = 0.0;
    double bound = 0.0;
    bool ok = false;
};

/// Returns log M_k given k, log M_{k-1} and the log of the recursion bound.
using MkGenerator = std::function<double(int k, double log_prev, double log_upper)>;

/// The sequence is built in log space; liminf is estimated as the minimum of
/// M_k^{1/2^k} over the last quarter of k. Throws std::invalid_argument when
/// a, b or M0 is below 1, k_max is outside [4, 1000], or the generator leaves
/// the admissible range [0, log_upper].
MkResult mk_limit_check(double M0, double a, double b, int k_max, const MkGenerator& generator);

/// Generator with equality in the recursion.
MkGenerator mk_equality();

struct CalibrationResult {
    double constant = 0.0;
    /// min over the held-out members of gap / rhs_scale.
    double worst_relative_gap = 0.0;
    int violations = 0;
    bool pass = false;
};

/// K = safety * max(0, max needed over `train`); a held-out member violates
/// when its gap is below -tol * rhs_scale.
CalibrationResult calibrate(const std::vector<GapTerms>& train, const std::vector<GapTerms>& held_out,
                            double safety = 2.0, double tol = 1e-8);

struct LemmaConfig {
    int corpus_size = 100;
    int grid_n = 48;
    std::uint64_t seed = 20240901;
    double floor = 0.1;
    /// Trudinger parameters.
    double a = 1.0;
    double eta = 1.0;
    /// Sublevel variant: D_tilde(s) = s with threshold L.
    double L = 1.0;
    double s0_tilde = 1.0;
    /// Poincare parameters.
    double p = 2.0;
    double varpi = 0.25;
    int random_trials = 100;
};

struct LemmaRow {
    std::string name;
    double constant = 0.0;
    double worst = 0.0;
    bool pass = false;
};

std::vector<LemmaRow> verify_lemmas(const LemmaConfig& cfg);

/// Plain-text table: lemma, constant, worst held-out gap, status.
std::string format_lemma_report(const std::vector<LemmaRow>& rows);

}  // namespace chemoflow
