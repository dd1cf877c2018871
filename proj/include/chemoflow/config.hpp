#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemoflow/diagnostics.hpp"
#include "chemoflow/grid.hpp"
#include "chemoflow/model.hpp"
#include "chemoflow/solver.hpp"

namespace chemoflow {

/// Catalogue of analytic initial data.
struct InitialSpec {
    enum class Density { Constant, Gaussian, Cosine };
    enum class Signal { Constant, Cosine };
    enum class Flow { Zero, Vortex, Shear };

    /// constant: n0 = n0_value. gaussian: exp(-r^2/(2 sigma^2)) rescaled so the
    /// discrete mass equals n0_mass. cosine: n0_value (1 + a cos(pi x/lx) cos(pi y/ly)).
    Density n0 = Density::Gaussian;
    double n0_value = 1.0;
    double n0_mass = 1.0;
    double n0_x = 0.5;
    double n0_y = 0.5;
    double n0_sigma = 0.1;
    double n0_amplitude = 0.5;

    /// constant: c0_value. cosine: c0_value + a cos(pi x/lx) cos(pi y/ly).
    Signal c0 = Signal::Cosine;
    double c0_value = 1.0;
    double c0_amplitude = 0.5;

    /// Stream functions on the nodes: vortex A sin^2(pi x/lx) sin^2(pi y/ly),
    /// shear A sin^2(pi x/lx) sin^2(2 pi y/ly) (two counter-rotating cells).
    Flow u0 = Flow::Zero;
    double u0_amplitude = 0.0;
};

struct OutputSpec {
    std::string directory = "out";
    bool snapshot = true;
    /// Snapshot every k-th cadence tick; 0 writes only the initial and final states.
    int snapshot_every = 0;
};

/// Which run monitors decide the exit status.
struct MonitorSpec {
    bool mass = true;
    bool c_max = true;
    bool c_lower = true;
    bool divergence = true;
    bool clamp = true;
    bool envelope = false;
};

struct CoefficientOverrides {
    std::optional<double> b1, b2, b3, bhat2, bhat3, mu, Gamma, q;
};

struct RunConfig {
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;
    ModelSpec model;
    InitialSpec initial;
    TimeControls time;
    OutputSpec output;
    MonitorSpec monitors;
    CoefficientOverrides coefficients;
    std::uint64_t seed = 0;

    Grid grid() const { return make_grid(nx, ny, lx, ly); }
};

/// Parse or hypothesis failures; each issue is one line of what().
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// INI text with sections [grid] [model] [initial] [time] [output]
/// [diagnostics] [run]. Unknown sections or keys, malformed values and
/// duplicate keys are reported with line numbers. A `table` key in [model]
/// is resolved against `base_dir`. The result has passed check_hypotheses.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// One message per violated hypothesis, each naming its condition.
std::vector<std::string> check_hypotheses(const RunConfig& cfg);

State initial_state(const RunConfig& cfg);
EnergyCoefficients coefficients_for(const RunConfig& cfg);

/// Serializes every field, so parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& cfg);

/// The reference configuration: 64x64 unit square, m = 2, gamma = 1/2,
/// S0 = 1, grad Phi = (0,-1), eps = 0.05, Gaussian n0 of mass 1,
/// c0 = 1 + cos(pi x) cos(pi y)/2, u0 = 0, T = 10, cadence 0.01.
RunConfig reference_config();

}  // namespace chemoflow
