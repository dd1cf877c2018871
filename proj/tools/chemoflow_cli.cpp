// Command-line driver. Exit codes: 0 success with every enabled monitor
// passing, 1 a monitor or lemma check failed, 2 invalid configuration or
// usage, 3 a run aborted.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "chemoflow/analysis.hpp"
#include "chemoflow/config.hpp"
#include "chemoflow/io.hpp"
#include "chemoflow/studies.hpp"

using namespace chemoflow;

namespace {

int report_failures(const std::vector<std::string>& failures)
{
    for (const auto& f : failures) std::fprintf(stderr, "monitor failed: %s\n", f.c_str());
    return failures.empty() ? 0 : 1;
}

void write_report(const std::string& dir, const std::string& name, const std::string& text)
{
    std::filesystem::create_directories(dir);
    write_file(dir + "/" + name, text);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"chemotaxis-fluid simulator with invariant monitors"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    double T = -1.0;

    auto* run_cmd = app.add_subcommand("run", "run a configuration and write timeseries.csv and snapshots");
    run_cmd->add_option("config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out_dir, "output directory (overrides [output] directory)");

    std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
    double sample_interval = 0.1;
    auto* eps_cmd = app.add_subcommand("sweep-eps", "space-time distances between runs with decreasing eps");
    eps_cmd->add_option("config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);
    eps_cmd->add_option("--eps", eps_list, "non-increasing eps values")->delimiter(',');
    eps_cmd->add_option("--T", T, "horizon (default: [time] t_end)");
    eps_cmd->add_option("--sample", sample_interval, "sampling interval in time");
    eps_cmd->add_option("--out", out_dir, "directory for eps_sweep.csv");

    std::vector<int> grids{16, 32, 64, 128};
    auto* grid_cmd = app.add_subcommand("sweep-grid", "observed convergence orders against the finest grid");
    grid_cmd->add_option("config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);
    grid_cmd->add_option("--grids", grids, "increasing nx values, each dividing the last")->delimiter(',');
    grid_cmd->add_option("--T", T, "horizon (default: [time] t_end)");
    grid_cmd->add_option("--out", out_dir, "directory for refinement.txt");

    LemmaConfig lemmas;
    auto* lemma_cmd = app.add_subcommand("verify-lemmas", "functional-inequality checks on a seeded corpus");
    lemma_cmd->add_option("--corpus", lemmas.corpus_size, "corpus size")->check(CLI::Range(2, 100000));
    lemma_cmd->add_option("--grid", lemmas.grid_n, "corpus grid size")->check(CLI::Range(8, 4096));
    lemma_cmd->add_option("--seed", lemmas.seed, "corpus seed");
    lemma_cmd->add_option("--floor", lemmas.floor, "corpus floor")->check(CLI::PositiveNumber);
    lemma_cmd->add_option("--trials", lemmas.random_trials, "randomized trials")->check(CLI::Range(1, 1000000));
    lemma_cmd->add_option("--out", out_dir, "directory for lemma_report.txt");

    auto* validate_cmd = app.add_subcommand("validate", "parse and check a configuration without running it");
    validate_cmd->add_option("config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) {
            const RunConfig cfg = load_config(config_path);
            std::printf("%s: valid\n", config_path.c_str());
            std::fputs(to_ini(cfg).c_str(), stdout);
            return 0;
        }
        if (*lemma_cmd) {
            const auto rows = verify_lemmas(lemmas);
            const std::string text = format_lemma_report(rows);
            std::fputs(text.c_str(), stdout);
            if (!out_dir.empty()) write_report(out_dir, "lemma_report.txt", text);
            for (const auto& r : rows)
                if (!r.pass) return 1;
            return 0;
        }

        RunConfig cfg = load_config(config_path);
        if (T < 0.0) T = cfg.time.t_end;
        if (*run_cmd) {
            if (!out_dir.empty()) cfg.output.directory = out_dir;
            ExecuteOptions opts;
            opts.write_outputs = true;
            const RunOutput out = execute(cfg, opts);
            const RunMonitors& m = out.result.monitors;
            std::printf("t = %.6g  steps %ld  substeps %ld\n", out.result.final_state.t, m.steps, m.substeps);
            std::printf("mass drift %.3e  c_max increase %.3e  c_min/lower %.6f  max div %.3e  clamp %.3e\n",
                        m.max_mass_drift, m.max_c_max_increase, m.min_c_lower_ratio, m.max_div, m.clamp_mass);
            if (out.envelope)
                std::printf("envelope (%s): mu %.4g  Gamma %.4g  fraction %.4f  bound %.6g  max %.6g\n",
                            out.functional == Functional::F ? "F" : "G", out.envelope->mu, out.envelope->Gamma,
                            out.envelope->fraction, out.envelope->bound, out.envelope->max_value);
            std::printf("outputs in %s\n", cfg.output.directory.c_str());
            return report_failures(monitor_failures(cfg, out));
        }
        if (*eps_cmd) {
            const EpsSweepResult r = eps_sweep(cfg, eps_list, T, sample_interval);
            const std::string text = format_eps_sweep(r);
            std::fputs(text.c_str(), stdout);
            if (!out_dir.empty()) write_report(out_dir, "eps_sweep.csv", text);
            return report_failures(r.failures);
        }
        if (*grid_cmd) {
            const RefinementResult r = refinement_sweep(cfg, grids, T);
            const std::string text = format_refinement(r);
            std::fputs(text.c_str(), stdout);
            if (!out_dir.empty()) write_report(out_dir, "refinement.txt", text);
            return report_failures(r.failures);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "invalid configuration:\n%s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run aborted: %s\n", e.what());
        return 3;
    }
    return 2;
}
