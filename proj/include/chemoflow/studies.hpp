#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chemoflow/config.hpp"
#include "chemoflow/diagnostics.hpp"
#include "chemoflow/solver.hpp"

namespace chemoflow {

struct ExecuteOptions {
    /// Write timeseries.csv and snapshots into cfg.output.directory.
    bool write_outputs = false;
    /// Keep every k-th tick state in memory (0 keeps none). The final
    /// state is always in RunOutput::result.
    int keep_every = 0;
};

struct RunOutput {
    std::vector<DiagnosticsRecord> series;
    RunResult result;
    std::vector<State> kept;
    Functional functional = Functional::F;
    /// Present when the envelope monitor is enabled.
    std::optional<EnvelopeReport> envelope;
};

/// Runs a validated config, recording diagnostics at every tick. Output
/// files: timeseries.csv, snapshot_<tick>.cns2 for the initial state and
/// every snapshot_every-th tick, and snapshot_final.cns2.
RunOutput execute(const RunConfig& cfg, const ExecuteOptions& opts = {});

/// One line per enabled monitor or hypothesis failure that did not hold.
std::vector<std::string> monitor_failures(const RunConfig& cfg, const RunOutput& out);

/// Concurrency cap for sweep members from CHEMOFLOW_THREADS (default 1).
int sweep_threads();

/// Runs tasks 0..count-1 on up to `threads` workers; rethrows the first failure.
void run_parallel(int count, int threads, const std::function<void(int)>& task);

struct EpsSweepResult {
    std::vector<double> eps;
    std::vector<double> sample_times;
    /// Consecutive-pair space-time L2 distances (size eps.size() - 1).
    std::vector<double> d_n, d_c, d_u;
    /// Enabled-monitor failures of any member, prefixed by its eps.
    std::vector<std::string> failures;
};

/// Throws std::invalid_argument when eps_list increases somewhere.
EpsSweepResult eps_sweep(const RunConfig& base, const std::vector<double>& eps_list, double T,
                         double sample_interval = 0.1);

struct RefinementResult {
    std::vector<int> grids;  ///< nx of each member; the last is the reference
    /// Discrete L2 errors at T against the restricted reference,
    /// one per non-reference grid.
    std::vector<double> error_n, error_c, error_u;
    /// Observed orders between consecutive non-reference grids;
    /// nullopt when an error vanishes or the grids coincide.
    std::vector<std::optional<double>> order_n, order_c, order_u;
    /// Enabled-monitor failures of any member, prefixed by its nx.
    std::vector<std::string> failures;
};

/// Grids are nx values in increasing order, each dividing the last; ny
/// scales with nx. Throws std::invalid_argument otherwise.
RefinementResult refinement_sweep(const RunConfig& base, const std::vector<int>& grids, double T);

std::string format_eps_sweep(const EpsSweepResult& r);
std::string format_refinement(const RefinementResult& r);

/// 2x2 (or r x r) block averages of cells and face averages of velocity onto `coarse`.
State restrict_state(const State& fine, const Grid& coarse);

}  // namespace chemoflow
