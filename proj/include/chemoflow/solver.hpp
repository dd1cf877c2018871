#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "chemoflow/grid.hpp"
#include "chemoflow/model.hpp"
#include "chemoflow/poisson.hpp"

namespace chemoflow {

enum class DiffusionMode { Explicit, SemiImplicit };

struct TimeControls {
    double dt_max = 1e-2;
    double cfl = 0.4;
    double t_end = 1.0;
    DiffusionMode c_diffusion = DiffusionMode::SemiImplicit;
    DiffusionMode u_diffusion = DiffusionMode::SemiImplicit;
    /// Substeps of the explicit n-update satisfy dt_s * rate <= n_safety, where
    /// rate bounds the per-cell outflow coefficient (diffusion, taxis, transport).
    double n_safety = 0.4;
    double dt_min = 1e-12;
    /// Sinks fire at t = k * cadence and at t_end.
    double cadence = 0.01;
};

/// Throws std::invalid_argument on out-of-range controls.
void validate_controls(const TimeControls& controls);

/// Thrown when the step size collapses below dt_min.
class StabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by run() when a non-finite value appears; carries the last finite state.
class NumericalBreakdown : public std::runtime_error {
public:
    NumericalBreakdown(const std::string& what, State last_good)
        : std::runtime_error(what), last_good_(std::move(last_good))
    {
    }
    const State& last_good() const { return last_good_; }

private:
    State last_good_;
};

struct StepInfo {
    double dt = 0.0;
    int substeps = 0;
    double clamp_mass = 0.0;  ///< mass added by clamping negative n to 0
};

/// Outer step bound from the advective CFL rule (and the explicit diffusion
/// limits when c or u diffusion is explicit), capped by dt_max.
double stable_dt(const State& state, const TimeControls& controls);

/// One split step, of size min(stable_dt, dt_limit):
///   n: explicit conservative substeps with c and u frozen;
///   c: upwind transport, implicit diffusion, consumption factor 1/(1 + dt n);
///   u: upwind transport, implicit viscosity, buoyancy n grad(Phi), projection.
State step(const State& state, const ModelSpec& spec, const TimeControls& controls, const PoissonSolver& poisson,
           StepInfo* info = nullptr, double dt_limit = std::numeric_limits<double>::infinity());

/// Per-step invariant monitors accumulated over a run.
struct RunMonitors {
    long steps = 0;
    long substeps = 0;
    double initial_mass = 0.0;
    double max_mass_drift = 0.0;       ///< relative
    double max_c_max_increase = 0.0;   ///< absolute, per step
    double min_c_lower_ratio = 1.0;    ///< min over steps of c_min / (min c0 exp(-K' t))
    double max_div = 0.0;
    double clamp_mass = 0.0;           ///< cumulative
    double running_n_max = 0.0;        ///< K'

    bool mass_ok(double tol = 1e-10) const { return max_mass_drift <= tol; }
    bool c_max_ok(double tol = 1e-12) const { return max_c_max_increase <= tol; }
    bool c_lower_ok(double tol = 1e-6) const { return min_c_lower_ratio >= 1.0 - tol; }
    bool div_ok(double tol = 1e-8) const { return max_div <= tol; }
    bool clamp_ok(double tol = 1e-10) const { return clamp_mass <= tol * initial_mass; }
    bool all_ok() const { return mass_ok() && c_max_ok() && c_lower_ok() && div_ok() && clamp_ok(); }
};

/// Invoked at t = 0, every cadence tick, and t_end with the state and the
/// monitors accumulated so far.
using Sink = std::function<void(const State&, const RunMonitors&)>;

struct RunResult {
    State final_state;
    RunMonitors monitors;
};

/// Advances `initial` to controls.t_end. Throws NumericalBreakdown on NaN,
/// StabilityError when dt collapses, std::invalid_argument on inadmissible
/// initial data.
RunResult run(const State& initial, const ModelSpec& spec, const TimeControls& controls, const PoissonSolver& poisson,
              const std::vector<Sink>& sinks = {});

/// Rejects negative or identically zero n, non-positive c, and velocities
/// that are not discretely solenoidal with zero wall normals.
void validate_initial(const State& initial, double div_tol = 1e-8);

}  // namespace chemoflow
