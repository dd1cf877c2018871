#include "chemoflow/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "chemoflow/operators.hpp"

namespace chemoflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string join_lines(const std::vector<std::string>& v)
{
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "\n") + s;
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || *end != '\0' || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> to_integer(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || *end != '\0') return std::nullopt;
    return v;
}

std::optional<bool> to_bool(const std::string& s)
{
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    return std::nullopt;
}

std::optional<std::vector<double>> to_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto v = to_double(trim(item));
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string out;
    for (double x : v) out += (out.empty() ? "" : ", ") + fmt(x);
    return out;
}

template <class E>
struct EnumNames {
    std::vector<std::pair<std::string, E>> names;

    std::optional<E> parse(const std::string& s) const
    {
        for (const auto& [n, e] : names)
            if (n == s) return e;
        return std::nullopt;
    }
    std::string print(E e) const
    {
        for (const auto& [n, v] : names)
            if (v == e) return n;
        return "?";
    }
    std::string options() const
    {
        std::string out;
        for (const auto& p : names) out += (out.empty() ? "" : "|") + p.first;
        return out;
    }
};

const EnumNames<InitialSpec::Density> kDensity{{{"constant", InitialSpec::Density::Constant},
                                                {"gaussian", InitialSpec::Density::Gaussian},
                                                {"cosine", InitialSpec::Density::Cosine}}};
const EnumNames<InitialSpec::Signal> kSignal{
    {{"constant", InitialSpec::Signal::Constant}, {"cosine", InitialSpec::Signal::Cosine}}};
const EnumNames<InitialSpec::Flow> kFlow{{{"zero", InitialSpec::Flow::Zero},
                                          {"vortex", InitialSpec::Flow::Vortex},
                                          {"shear", InitialSpec::Flow::Shear}}};
const EnumNames<SensitivityKind> kSensitivity{
    {{"isotropic", SensitivityKind::Isotropic}, {"rotation", SensitivityKind::Rotation}}};
const EnumNames<DiffusionMode> kMode{
    {{"implicit", DiffusionMode::SemiImplicit}, {"explicit", DiffusionMode::Explicit}}};

/// A config key: parse returns an error message (empty on success).
struct Key {
    std::string section;
    std::string name;
    std::function<std::string(RunConfig&, const std::string&, const std::string& base_dir)> parse;
    std::function<std::string(const RunConfig&)> print;
};

Key real(const std::string& sec, const std::string& name, double RunConfig::*outer)
{
    return {sec, name,
            [outer](RunConfig& c, const std::string& v, const std::string&) -> std::string {
                const auto d = to_double(v);
                if (!d) return "expected a number";
                c.*outer = *d;
                return "";
            },
            [outer](const RunConfig& c) { return fmt(c.*outer); }};
}

template <class S>
Key real_in(const std::string& sec, const std::string& name, S RunConfig::*block, double S::*field)
{
    return {sec, name,
            [=](RunConfig& c, const std::string& v, const std::string&) -> std::string {
                const auto d = to_double(v);
                if (!d) return "expected a number";
                (c.*block).*field = *d;
                return "";
            },
            [=](const RunConfig& c) { return fmt((c.*block).*field); }};
}

template <class S>
Key flag_in(const std::string& sec, const std::string& name, S RunConfig::*block, bool S::*field)
{
    return {sec, name,
            [=](RunConfig& c, const std::string& v, const std::string&) -> std::string {
                const auto b = to_bool(v);
                if (!b) return "expected true or false";
                (c.*block).*field = *b;
                return "";
            },
            [=](const RunConfig& c) { return std::string((c.*block).*field ? "true" : "false"); }};
}

template <class S, class E>
Key choice_in(const std::string& sec, const std::string& name, S RunConfig::*block, E S::*field,
              const EnumNames<E>& names)
{
    return {sec, name,
            [=, &names](RunConfig& c, const std::string& v, const std::string&) -> std::string {
                const auto e = names.parse(v);
                if (!e) return "expected one of " + names.options();
                (c.*block).*field = *e;
                return "";
            },
            [=, &names](const RunConfig& c) { return names.print((c.*block).*field); }};
}

Key optional_coefficient(const std::string& name, std::optional<double> CoefficientOverrides::*field)
{
    return {"diagnostics", name,
            [=](RunConfig& c, const std::string& v, const std::string&) -> std::string {
                const auto d = to_double(v);
                if (!d) return "expected a number";
                c.coefficients.*field = *d;
                return "";
            },
            [=](const RunConfig& c) {
                const auto& o = c.coefficients.*field;
                return o ? fmt(*o) : std::string();
            }};
}

Tabulated& tabulated(RunConfig& c)
{
    if (!std::holds_alternative<Tabulated>(c.model.diffusion)) c.model.diffusion = Tabulated{};
    return std::get<Tabulated>(c.model.diffusion);
}

std::string read_table(RunConfig& c, const std::string& path)
{
    std::ifstream in(path);
    if (!in) return "cannot open diffusion table '" + path + "'";
    Tabulated& t = tabulated(c);
    t.knots.clear();
    t.values.clear();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double k = 0.0, v = 0.0;
        if (!(ls >> k >> v)) return path + ":" + std::to_string(lineno) + ": expected 'knot value'";
        t.knots.push_back(k);
        t.values.push_back(v);
    }
    return "";
}

const std::vector<Key>& keys()
{
    static const std::vector<Key> k = [] {
        std::vector<Key> v;
        v.push_back({"grid", "nx",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto i = to_integer(s);
                         if (!i || *i < 1 || *i > 1 << 16) return "expected a positive integer";
                         c.nx = static_cast<int>(*i);
                         return "";
                     },
                     [](const RunConfig& c) { return std::to_string(c.nx); }});
        v.push_back({"grid", "ny",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto i = to_integer(s);
                         if (!i || *i < 1 || *i > 1 << 16) return "expected a positive integer";
                         c.ny = static_cast<int>(*i);
                         return "";
                     },
                     [](const RunConfig& c) { return std::to_string(c.ny); }});
        v.push_back(real("grid", "lx", &RunConfig::lx));
        v.push_back(real("grid", "ly", &RunConfig::ly));

        v.push_back({"model", "diffusion",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         if (s == "porous") {
                             if (!std::holds_alternative<PorousMedium>(c.model.diffusion))
                                 c.model.diffusion = PorousMedium{};
                         } else if (s == "tabulated") {
                             tabulated(c);
                         } else {
                             return "expected porous|tabulated";
                         }
                         return "";
                     },
                     [](const RunConfig& c) {
                         return std::string(std::holds_alternative<PorousMedium>(c.model.diffusion) ? "porous"
                                                                                                   : "tabulated");
                     }});
        v.push_back({"model", "m",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto d = to_double(s);
                         if (!d) return "expected a number";
                         c.model.diffusion = PorousMedium{*d};
                         return "";
                     },
                     [](const RunConfig& c) {
                         const auto* p = std::get_if<PorousMedium>(&c.model.diffusion);
                         return p ? fmt(p->m) : std::string();
                     }});
        v.push_back({"model", "knots",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto l = to_list(s);
                         if (!l) return "expected a comma-separated list of numbers";
                         tabulated(c).knots = *l;
                         return "";
                     },
                     [](const RunConfig& c) {
                         const auto* t = std::get_if<Tabulated>(&c.model.diffusion);
                         return t ? fmt_list(t->knots) : std::string();
                     }});
        v.push_back({"model", "values",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto l = to_list(s);
                         if (!l) return "expected a comma-separated list of numbers";
                         tabulated(c).values = *l;
                         return "";
                     },
                     [](const RunConfig& c) {
                         const auto* t = std::get_if<Tabulated>(&c.model.diffusion);
                         return t ? fmt_list(t->values) : std::string();
                     }});
        v.push_back({"model", "table",
                     [](RunConfig& c, const std::string& s, const std::string& base) -> std::string {
                         return read_table(c, s.empty() || s[0] == '/' ? s : base + "/" + s);
                     },
                     [](const RunConfig&) { return std::string(); }});
        v.push_back(real_in("model", "gamma", &RunConfig::model, &ModelSpec::gamma));
        v.push_back(real_in("model", "S0", &RunConfig::model, &ModelSpec::s0_sensitivity));
        v.push_back(choice_in("model", "sensitivity", &RunConfig::model, &ModelSpec::sensitivity_kind, kSensitivity));
        v.push_back(real_in("model", "theta", &RunConfig::model, &ModelSpec::theta));
        v.push_back({"model", "phi_gradient",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto l = to_list(s);
                         if (!l || l->size() != 2) return "expected two comma-separated numbers";
                         c.model.phi_gradient = {(*l)[0], (*l)[1]};
                         return "";
                     },
                     [](const RunConfig& c) {
                         return fmt_list({c.model.phi_gradient[0], c.model.phi_gradient[1]});
                     }});
        v.push_back(real_in("model", "epsilon", &RunConfig::model, &ModelSpec::epsilon));
        v.push_back(real_in("model", "L", &RunConfig::model, &ModelSpec::L));
        v.push_back(real_in("model", "M", &RunConfig::model, &ModelSpec::M));

        v.push_back(choice_in("initial", "n0", &RunConfig::initial, &InitialSpec::n0, kDensity));
        v.push_back(real_in("initial", "n0_value", &RunConfig::initial, &InitialSpec::n0_value));
        v.push_back(real_in("initial", "n0_mass", &RunConfig::initial, &InitialSpec::n0_mass));
        v.push_back(real_in("initial", "n0_x", &RunConfig::initial, &InitialSpec::n0_x));
        v.push_back(real_in("initial", "n0_y", &RunConfig::initial, &InitialSpec::n0_y));
        v.push_back(real_in("initial", "n0_sigma", &RunConfig::initial, &InitialSpec::n0_sigma));
        v.push_back(real_in("initial", "n0_amplitude", &RunConfig::initial, &InitialSpec::n0_amplitude));
        v.push_back(choice_in("initial", "c0", &RunConfig::initial, &InitialSpec::c0, kSignal));
        v.push_back(real_in("initial", "c0_value", &RunConfig::initial, &InitialSpec::c0_value));
        v.push_back(real_in("initial", "c0_amplitude", &RunConfig::initial, &InitialSpec::c0_amplitude));
        v.push_back(choice_in("initial", "u0", &RunConfig::initial, &InitialSpec::u0, kFlow));
        v.push_back(real_in("initial", "u0_amplitude", &RunConfig::initial, &InitialSpec::u0_amplitude));

        v.push_back(real_in("time", "t_end", &RunConfig::time, &TimeControls::t_end));
        v.push_back(real_in("time", "cfl", &RunConfig::time, &TimeControls::cfl));
        v.push_back(real_in("time", "dt_max", &RunConfig::time, &TimeControls::dt_max));
        v.push_back(real_in("time", "dt_min", &RunConfig::time, &TimeControls::dt_min));
        v.push_back(real_in("time", "n_safety", &RunConfig::time, &TimeControls::n_safety));
        v.push_back(choice_in("time", "c_diffusion", &RunConfig::time, &TimeControls::c_diffusion, kMode));
        v.push_back(choice_in("time", "u_diffusion", &RunConfig::time, &TimeControls::u_diffusion, kMode));

        v.push_back(real_in("output", "cadence", &RunConfig::time, &TimeControls::cadence));
        v.push_back({"output", "directory",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         if (s.empty()) return "expected a path";
                         c.output.directory = s;
                         return "";
                     },
                     [](const RunConfig& c) { return c.output.directory; }});
        v.push_back(flag_in("output", "snapshot", &RunConfig::output, &OutputSpec::snapshot));
        v.push_back({"output", "snapshot_every",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto i = to_integer(s);
                         if (!i || *i < 0 || *i > 1 << 30) return "expected a non-negative integer";
                         c.output.snapshot_every = static_cast<int>(*i);
                         return "";
                     },
                     [](const RunConfig& c) { return std::to_string(c.output.snapshot_every); }});

        v.push_back(flag_in("diagnostics", "mass", &RunConfig::monitors, &MonitorSpec::mass));
        v.push_back(flag_in("diagnostics", "c_max", &RunConfig::monitors, &MonitorSpec::c_max));
        v.push_back(flag_in("diagnostics", "c_lower", &RunConfig::monitors, &MonitorSpec::c_lower));
        v.push_back(flag_in("diagnostics", "divergence", &RunConfig::monitors, &MonitorSpec::divergence));
        v.push_back(flag_in("diagnostics", "clamp", &RunConfig::monitors, &MonitorSpec::clamp));
        v.push_back(flag_in("diagnostics", "envelope", &RunConfig::monitors, &MonitorSpec::envelope));
        v.push_back(optional_coefficient("b1", &CoefficientOverrides::b1));
        v.push_back(optional_coefficient("b2", &CoefficientOverrides::b2));
        v.push_back(optional_coefficient("b3", &CoefficientOverrides::b3));
        v.push_back(optional_coefficient("bhat2", &CoefficientOverrides::bhat2));
        v.push_back(optional_coefficient("bhat3", &CoefficientOverrides::bhat3));
        v.push_back(optional_coefficient("mu", &CoefficientOverrides::mu));
        v.push_back(optional_coefficient("Gamma", &CoefficientOverrides::Gamma));
        v.push_back(optional_coefficient("q", &CoefficientOverrides::q));

        v.push_back({"run", "seed",
                     [](RunConfig& c, const std::string& s, const std::string&) -> std::string {
                         const auto i = to_integer(s);
                         if (!i || *i < 0) return "expected a non-negative integer";
                         c.seed = static_cast<std::uint64_t>(*i);
                         return "";
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        return v;
    }();
    return k;
}

ScalarField density_field(const Grid& g, const InitialSpec& in)
{
    using D = InitialSpec::Density;
    switch (in.n0) {
    case D::Constant:
        return ScalarField(g, in.n0_value);
    case D::Cosine:
        return sample(g, [&](double x, double y) {
            return in.n0_value * (1.0 + in.n0_amplitude * std::cos(kPi * x / g.lx()) * std::cos(kPi * y / g.ly()));
        });
    case D::Gaussian:
    default: {
        const double s2 = 2.0 * in.n0_sigma * in.n0_sigma;
        ScalarField n = sample(g, [&](double x, double y) {
            const double r2 = (x - in.n0_x) * (x - in.n0_x) + (y - in.n0_y) * (y - in.n0_y);
            return std::exp(-r2 / s2);
        });
        const double m = integrate(n);
        if (m > 0.0)
            for (double& v : n.values) v *= in.n0_mass / m;
        return n;
    }
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_lines(issues)), issues_(std::move(issues))
{
}

State initial_state(const RunConfig& cfg)
{
    const Grid g = cfg.grid();
    const InitialSpec& in = cfg.initial;
    State s(g);
    s.n = density_field(g, in);
    if (in.c0 == InitialSpec::Signal::Constant)
        s.c = ScalarField(g, in.c0_value);
    else
        s.c = sample(g, [&](double x, double y) {
            return in.c0_value + in.c0_amplitude * std::cos(kPi * x / g.lx()) * std::cos(kPi * y / g.ly());
        });
    const double A = in.u0_amplitude;
    if (in.u0 == InitialSpec::Flow::Vortex)
        s.u = velocity_from_stream(g, [&](double x, double y) {
            const double sx = std::sin(kPi * x / g.lx()), sy = std::sin(kPi * y / g.ly());
            return A * sx * sx * sy * sy;
        });
    else if (in.u0 == InitialSpec::Flow::Shear)
        s.u = velocity_from_stream(g, [&](double x, double y) {
            const double sx = std::sin(kPi * x / g.lx()), sy = std::sin(2.0 * kPi * y / g.ly());
            return A * sx * sx * sy * sy;
        });
    // sin(pi) is not exactly 0; the walls must be exact.
    s.u.zero_normal_boundary();
    return s;
}

EnergyCoefficients coefficients_for(const RunConfig& cfg)
{
    EnergyCoefficients c = make_coefficients(cfg.model);
    const CoefficientOverrides& o = cfg.coefficients;
    if (o.b1) c.b1 = *o.b1;
    if (o.b2) c.b2 = *o.b2;
    if (o.b3) c.b3 = *o.b3;
    if (o.bhat2) c.bhat2 = *o.bhat2;
    if (o.bhat3) c.bhat3 = *o.bhat3;
    if (o.mu) c.mu = *o.mu;
    if (o.Gamma) c.Gamma = *o.Gamma;
    if (o.q) c.q = *o.q;
    return c;
}

std::vector<std::string> check_hypotheses(const RunConfig& cfg)
{
    std::vector<std::string> bad;
    auto fail = [&](const std::string& condition, const std::string& detail) {
        bad.push_back("hypothesis " + condition + " violated: " + detail);
    };
    const ModelSpec& m = cfg.model;

    if (cfg.nx < 4 || cfg.ny < 4) bad.push_back("grid: nx and ny must be at least 4");
    if (!(cfg.lx > 0.0) || !(cfg.ly > 0.0)) bad.push_back("grid: lx and ly must be positive");
    try {
        validate_controls(cfg.time);
    } catch (const std::invalid_argument& e) {
        bad.push_back(std::string("time: ") + e.what());
    }
    if (!bad.empty()) return bad;

    if (!(m.gamma >= 0.0 && m.gamma <= 5.0 / 6.0)) fail("γ∈[0,5/6]", "gamma = " + fmt(m.gamma));
    if (!(m.epsilon > 0.0 && m.epsilon < 1.0)) fail("ε∈(0,1)", "epsilon = " + fmt(m.epsilon));
    if (!(m.s0_sensitivity >= 0.0)) fail("S₀ ≥ 0", "S0 = " + fmt(m.s0_sensitivity));
    if (!(m.L > 0.0)) fail("L > 0", "L = " + fmt(m.L));
    if (!(m.M > 0.0)) fail("M > 0", "M = " + fmt(m.M));

    bool diffusion_ok = bad.empty();
    if (diffusion_ok) {
        try {
            validate_model(m);
        } catch (const std::invalid_argument& e) {
            fail("D ∈ C²([0,∞)), D > 0 on (0,∞)", e.what());
            diffusion_ok = false;
        }
    }
    if (diffusion_ok) {
        try {
            const double s0 = threshold_s0(m);
            try {
                kappa_of(s0, m);
            } catch (const std::domain_error& e) {
                fail("inf D(n)/n > 0 on (0,2s₀)", e.what());
            }
        } catch (const std::domain_error& e) {
            fail("liminf D(s) > L as s→∞", e.what());
        }
    }

    const State s = initial_state(cfg);
    double n_min = s.n.min();
    if (!(n_min >= 0.0) || !(integrate(s.n) > 0.0))
        fail("n₀ ≥ 0 and n₀ ≢ 0", "min n0 = " + fmt(n_min) + ", mass = " + fmt(integrate(s.n)));
    if (!(s.c.min() > 0.0)) fail("c₀ > 0", "min c0 = " + fmt(s.c.min()));
    if (!(s.c.max() <= m.M)) fail("‖c₀‖_{L∞(Ω)} ≤ M", "max c0 = " + fmt(s.c.max()) + ", M = " + fmt(m.M));
    double l1 = 0.0;
    for (double v : s.n.values) l1 += std::abs(v);
    l1 *= s.n.grid.cell_area();
    if (m.gamma > 0.5 && !(l1 <= m.M))
        fail("γ > 1/2 requires also ‖n₀‖_{L¹(Ω)} ≤ M", "||n0||_1 = " + fmt(l1) + ", M = " + fmt(m.M));
    const ScalarField d = div(s.u);
    double dmax = 0.0;
    for (double v : d.values) dmax = std::max(dmax, std::abs(v));
    if (!(dmax <= 1e-8)) fail("∇·u₀ = 0", "max |div u0| = " + fmt(dmax));

    if (diffusion_ok && bad.empty()) {
        try {
            validate_coefficients(coefficients_for(cfg));
        } catch (const std::invalid_argument& e) {
            bad.push_back(std::string("diagnostics: ") + e.what());
        }
    }
    return bad;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir)
{
    RunConfig cfg;
    std::vector<std::string> issues;
    std::set<std::string> sections;
    for (const Key& k : keys()) sections.insert(k.section);
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    auto issue = [&](const std::string& msg) { issues.push_back("line " + std::to_string(lineno) + ": " + msg); };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issue("malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) issue("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issue("expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
        if (section.empty()) {
            issue("key '" + key + "' outside any section");
            continue;
        }
        if (!sections.count(section)) continue;
        const Key* match = nullptr;
        for (const Key& k : keys())
            if (k.section == section && k.name == key) match = &k;
        if (!match) {
            issue("unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        if (!seen.insert(section + "." + key).second) {
            issue("duplicate key '" + key + "' in [" + section + "]");
            continue;
        }
        const std::string err = match->parse(cfg, value, base_dir);
        if (!err.empty()) issue(section + "." + key + ": " + err + " (got '" + value + "')");
    }
    if (!issues.empty()) throw ConfigError(issues);
    const auto violations = check_hypotheses(cfg);
    if (!violations.empty()) throw ConfigError(violations);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    const auto slash = path.find_last_of('/');
    return parse_config(ss.str(), slash == std::string::npos ? "." : path.substr(0, slash));
}

std::string to_ini(const RunConfig& cfg)
{
    std::string out, section;
    for (const Key& k : keys()) {
        const std::string v = k.print(cfg);
        if (v.empty()) continue;
        if (k.section != section) {
            out += (out.empty() ? "[" : "\n[") + k.section + "]\n";
            section = k.section;
        }
        out += k.name + " = " + v + "\n";
    }
    return out;
}

RunConfig reference_config()
{
    RunConfig c;
    c.nx = c.ny = 64;
    c.model = ModelSpec{};
    c.model.diffusion = PorousMedium{2.0};
    c.model.gamma = 0.5;
    c.model.s0_sensitivity = 1.0;
    c.model.phi_gradient = {0.0, -1.0};
    c.model.epsilon = 0.05;
    c.model.M = 1.5;
    c.initial = InitialSpec{};
    c.time = TimeControls{};
    c.time.t_end = 10.0;
    c.time.cadence = 0.01;
    c.output.directory = "out/reference";
    c.output.snapshot_every = 100;
    return c;
}

}  // namespace chemoflow
