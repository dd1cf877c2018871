#include "chemoflow/studies.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "chemoflow/io.hpp"
#include "chemoflow/operators.hpp"
#include "chemoflow/poisson.hpp"

namespace chemoflow {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double l2_distance(const std::vector<double>& a, const std::vector<double>& b, double weight)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s * weight;
}

double cell_d2(const ScalarField& a, const ScalarField& b)
{
    return l2_distance(a.values, b.values, a.grid.cell_area());
}

double velocity_d2(const VectorField& a, const VectorField& b)
{
    VectorField d = a;
    for (std::size_t k = 0; k < d.ux.size(); ++k) d.ux[k] -= b.ux[k];
    for (std::size_t k = 0; k < d.uy.size(); ++k) d.uy[k] -= b.uy[k];
    return face_inner(d, d);
}

void require_valid(const RunConfig& cfg)
{
    const auto issues = check_hypotheses(cfg);
    if (!issues.empty()) throw ConfigError(issues);
}

std::optional<double> observed_order(double coarse_err, double fine_err, int coarse_n, int fine_n)
{
    if (!(coarse_err > 0.0) || !(fine_err > 0.0) || coarse_n == fine_n) return std::nullopt;
    return std::log(coarse_err / fine_err) / std::log(static_cast<double>(fine_n) / coarse_n);
}

std::string orders(const std::vector<std::optional<double>>& o)
{
    if (o.empty()) return "undefined";
    std::string s;
    for (const auto& v : o) s += (s.empty() ? "" : " ") + (v ? num(*v) : std::string("undefined"));
    return s;
}

}  // namespace

RunOutput execute(const RunConfig& cfg, const ExecuteOptions& opts)
{
    require_valid(cfg);
    const State init = initial_state(cfg);
    const Grid g = init.n.grid;
    const PoissonSolver poisson(g);
    const EnergyCoefficients coeffs = coefficients_for(cfg);
    const TruncationTable table = build_truncations(cfg.model, coeffs.s0);

    double l1 = 0.0;
    for (double v : init.n.values) l1 += std::abs(v);
    const Functional functional = select_functional(cfg.model, l1 * g.cell_area());

    namespace fs = std::filesystem;
    const fs::path dir = cfg.output.directory;
    const bool snapshots = opts.write_outputs && cfg.output.snapshot;
    if (opts.write_outputs) fs::create_directories(dir);

    std::vector<DiagnosticsRecord> series;
    std::vector<State> kept;
    long tick = 0;
    auto sink = [&](const State& s, const RunMonitors& mon) {
        series.push_back(record(s, cfg.model, coeffs, table, mon.clamp_mass));
        if (opts.keep_every > 0 && tick % opts.keep_every == 0) kept.push_back(s);
        const bool periodic = cfg.output.snapshot_every > 0 && tick % cfg.output.snapshot_every == 0;
        if (snapshots && (tick == 0 || periodic)) {
            char name[48];
            std::snprintf(name, sizeof name, "snapshot_%06ld.cns2", tick);
            write_file((dir / name).string(), encode_snapshot(s));
        }
        ++tick;
    };
    RunResult result = run(init, cfg.model, cfg.time, poisson, {sink});
    RunOutput out{std::move(series), std::move(result), std::move(kept), functional, std::nullopt};

    if (opts.write_outputs) {
        write_file((dir / "timeseries.csv").string(), format_timeseries(out.series));
        if (snapshots) write_file((dir / "snapshot_final.cns2").string(), encode_snapshot(out.result.final_state));
    }
    if (cfg.monitors.envelope) out.envelope = functional_envelope(out.series, coeffs, out.functional);
    return out;
}

std::vector<std::string> monitor_failures(const RunConfig& cfg, const RunOutput& out)
{
    std::vector<std::string> f;
    const RunMonitors& m = out.result.monitors;
    const MonitorSpec& on = cfg.monitors;
    if (on.mass && !m.mass_ok()) f.push_back("mass drift " + num(m.max_mass_drift) + " exceeds 1e-10");
    if (on.c_max && !m.c_max_ok()) f.push_back("c_max increased by " + num(m.max_c_max_increase) + " in one step");
    if (on.c_lower && !m.c_lower_ok())
        f.push_back("c_min fell to " + num(m.min_c_lower_ratio) + " of min(c0) exp(-K' t)");
    if (on.divergence && !m.div_ok()) f.push_back("max |div u| " + num(m.max_div) + " exceeds 1e-8");
    if (on.clamp && !m.clamp_ok()) f.push_back("clamped mass " + num(m.clamp_mass) + " exceeds tolerance");
    if (on.envelope && out.envelope && !out.envelope->satisfied())
        f.push_back("energy envelope not satisfied (best fraction " + num(out.envelope->fraction) + ")");
    return f;
}

int sweep_threads()
{
    const char* v = std::getenv("CHEMOFLOW_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) return 1;
    return static_cast<int>(std::min<long>(n, 256));
}

void run_parallel(int count, int threads, const std::function<void(int)>& task)
{
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int k = 0; k < count; ++k) task(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int k; (k = next.fetch_add(1)) < count;) {
                try {
                    task(k);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(guard);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

EpsSweepResult eps_sweep(const RunConfig& base, const std::vector<double>& eps_list, double T,
                         double sample_interval)
{
    for (std::size_t k = 1; k < eps_list.size(); ++k)
        if (eps_list[k] > eps_list[k - 1]) throw std::invalid_argument("eps_sweep: eps list must be non-increasing");
    if (!(sample_interval > 0.0)) throw std::invalid_argument("eps_sweep: sample interval must be positive");
    EpsSweepResult r;
    r.eps = eps_list;
    if (eps_list.size() < 2) return r;

    const int every = std::max(1, static_cast<int>(std::lround(sample_interval / base.time.cadence)));
    std::vector<std::vector<State>> samples(eps_list.size());
    std::vector<std::vector<std::string>> failed(eps_list.size());
    run_parallel(static_cast<int>(eps_list.size()), sweep_threads(), [&](int k) {
        RunConfig cfg = base;
        cfg.model.epsilon = eps_list[static_cast<std::size_t>(k)];
        cfg.time.t_end = T;
        ExecuteOptions opts;
        opts.keep_every = every;
        RunOutput out = execute(cfg, opts);
        for (const auto& f : monitor_failures(cfg, out))
            failed[static_cast<std::size_t>(k)].push_back("eps " + num(cfg.model.epsilon) + ": " + f);
        if (out.kept.empty() || out.kept.back().t != out.result.final_state.t)
            out.kept.push_back(out.result.final_state);
        samples[static_cast<std::size_t>(k)] = std::move(out.kept);
    });

    for (const auto& f : failed) r.failures.insert(r.failures.end(), f.begin(), f.end());
    const auto& ref = samples.front();
    for (const State& s : ref) r.sample_times.push_back(s.t);
    std::vector<double> w(ref.size(), 0.0);
    for (std::size_t k = 0; k + 1 < ref.size(); ++k) {
        const double dt = ref[k + 1].t - ref[k].t;
        w[k] += 0.5 * dt;
        w[k + 1] += 0.5 * dt;
    }
    if (ref.size() == 1) w[0] = 1.0;
    for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
        const auto& a = samples[j];
        const auto& b = samples[j + 1];
        if (a.size() != b.size()) throw std::runtime_error("eps_sweep: members sampled at different times");
        double dn = 0.0, dc = 0.0, du = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            dn += w[k] * cell_d2(a[k].n, b[k].n);
            dc += w[k] * cell_d2(a[k].c, b[k].c);
            du += w[k] * velocity_d2(a[k].u, b[k].u);
        }
        r.d_n.push_back(std::sqrt(dn));
        r.d_c.push_back(std::sqrt(dc));
        r.d_u.push_back(std::sqrt(du));
    }
    return r;
}

State restrict_state(const State& fine, const Grid& coarse)
{
    const Grid& f = fine.n.grid;
    if (f.nx() % coarse.nx() != 0 || f.ny() % coarse.ny() != 0)
        throw std::invalid_argument("restrict_state: coarse grid must divide the fine grid");
    const int rx = f.nx() / coarse.nx(), ry = f.ny() / coarse.ny();
    State s(coarse);
    s.t = fine.t;
    for (int J = 0; J < coarse.ny(); ++J)
        for (int I = 0; I < coarse.nx(); ++I) {
            double n = 0.0, c = 0.0;
            for (int b = 0; b < ry; ++b)
                for (int a = 0; a < rx; ++a) {
                    n += fine.n(I * rx + a, J * ry + b);
                    c += fine.c(I * rx + a, J * ry + b);
                }
            s.n(I, J) = n / (rx * ry);
            s.c(I, J) = c / (rx * ry);
        }
    for (int J = 0; J < coarse.ny(); ++J)
        for (int I = 0; I <= coarse.nx(); ++I) {
            double v = 0.0;
            for (int b = 0; b < ry; ++b) v += fine.u.x(I * rx, J * ry + b);
            s.u.x(I, J) = v / ry;
        }
    for (int J = 0; J <= coarse.ny(); ++J)
        for (int I = 0; I < coarse.nx(); ++I) {
            double v = 0.0;
            for (int a = 0; a < rx; ++a) v += fine.u.y(I * rx + a, J * ry);
            s.u.y(I, J) = v / rx;
        }
    return s;
}

RefinementResult refinement_sweep(const RunConfig& base, const std::vector<int>& grids, double T)
{
    if (grids.empty()) throw std::invalid_argument("refinement_sweep: no grids");
    const int finest = grids.back();
    for (std::size_t k = 0; k < grids.size(); ++k) {
        if (grids[k] < 4 || finest % grids[k] != 0 || (grids[k] * base.ny) % base.nx != 0)
            throw std::invalid_argument("refinement_sweep: every grid must divide the finest and keep the aspect ratio");
        if (k > 0 && grids[k] < grids[k - 1]) throw std::invalid_argument("refinement_sweep: grids must not decrease");
    }
    RefinementResult r;
    r.grids = grids;
    std::vector<State> finals(grids.size(), State(base.grid()));
    std::vector<std::vector<std::string>> failed(grids.size());
    run_parallel(static_cast<int>(grids.size()), sweep_threads(), [&](int k) {
        RunConfig cfg = base;
        cfg.nx = grids[static_cast<std::size_t>(k)];
        cfg.ny = cfg.nx * base.ny / base.nx;
        cfg.time.t_end = T;
        RunOutput out = execute(cfg);
        for (const auto& f : monitor_failures(cfg, out))
            failed[static_cast<std::size_t>(k)].push_back("nx " + std::to_string(cfg.nx) + ": " + f);
        finals[static_cast<std::size_t>(k)] = std::move(out.result.final_state);
    });
    for (const auto& f : failed) r.failures.insert(r.failures.end(), f.begin(), f.end());
    const State& ref = finals.back();
    for (std::size_t k = 0; k + 1 < grids.size(); ++k) {
        const State target = restrict_state(ref, finals[k].n.grid);
        r.error_n.push_back(std::sqrt(cell_d2(finals[k].n, target.n)));
        r.error_c.push_back(std::sqrt(cell_d2(finals[k].c, target.c)));
        r.error_u.push_back(std::sqrt(velocity_d2(finals[k].u, target.u)));
    }
    for (std::size_t k = 0; k + 1 < r.error_n.size(); ++k) {
        r.order_n.push_back(observed_order(r.error_n[k], r.error_n[k + 1], grids[k], grids[k + 1]));
        r.order_c.push_back(observed_order(r.error_c[k], r.error_c[k + 1], grids[k], grids[k + 1]));
        r.order_u.push_back(observed_order(r.error_u[k], r.error_u[k + 1], grids[k], grids[k + 1]));
    }
    return r;
}

std::string format_eps_sweep(const EpsSweepResult& r)
{
    std::string out = "eps_j,eps_j+1,d_n,d_c,d_u\n";
    for (std::size_t k = 0; k < r.d_n.size(); ++k)
        out += num(r.eps[k]) + "," + num(r.eps[k + 1]) + "," + num(r.d_n[k]) + "," + num(r.d_c[k]) + "," +
               num(r.d_u[k]) + "\n";
    return out;
}

std::string format_refinement(const RefinementResult& r)
{
    std::string out = "nx,error_n,error_c,error_u\n";
    for (std::size_t k = 0; k < r.error_n.size(); ++k)
        out += std::to_string(r.grids[k]) + "," + num(r.error_n[k]) + "," + num(r.error_c[k]) + "," +
               num(r.error_u[k]) + "\n";
    out += "order_n: " + orders(r.order_n) + "\n";
    out += "order_c: " + orders(r.order_c) + "\n";
    out += "order_u: " + orders(r.order_u) + "\n";
    return out;
}

}  // namespace chemoflow
