#include "bcx/scenario.hpp"

#include "bcx/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace bcx {

using nlohmann::json;

namespace {

constexpr double kPi = 3.141592653589793;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("scenario: unknown field '" + it.key() + "' in " + where);
}

double get_num(const json& j, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ConfigError("scenario: field '" + key + "' must be a number");
    return j[key].get<double>();
}

Fraction parse_fraction(const json& j) {
    if (j.is_number_integer()) return Fraction(j.get<long long>());
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        const auto slash = s.find('/');
        if (slash == std::string::npos) return Fraction(std::stoll(s));
        return Fraction(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }
    if (j.is_number_float()) {
        // continued-fraction rationalization with bounded denominator
        double x = j.get<double>();
        long long num = 1, den = 0, pnum = 0, pden = 1;
        double v = x;
        for (int it = 0; it < 30; ++it) {
            const long long a = static_cast<long long>(std::floor(v));
            long long tn = a * num + pnum, td = a * den + pden;
            pnum = num; pden = den; num = tn; den = td;
            if (den > 1000000) break;
            const double rem = v - a;
            if (std::abs(static_cast<double>(num) / den - x) < 1e-12) break;
            if (rem < 1e-12) break;
            v = 1.0 / rem;
        }
        return Fraction(num, den);
    }
    throw ConfigError("scenario: p_exponent must be integer, float or 'num/den' string");
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
    }
    Scenario sc;
    reject_unknown(j, {"name", "params", "domain", "data", "solver", "fit", "sweep",
                       "p_exponent", "seed"},
                   "scenario");
    if (j.contains("name")) sc.name = j["name"].get<std::string>();
    if (j.contains("params")) {
        const auto& p = j["params"];
        reject_unknown(p, {"a", "b", "c", "k", "s", "b_over_a"}, "params");
        sc.params.a = get_num(p, "a", 1.0);
        sc.params.b = get_num(p, "b", 1.0);
        sc.params.c = get_num(p, "c", 1.0);
        sc.params.k = get_num(p, "k", 0.0);
        sc.params.s = static_cast<int>(get_num(p, "s", 1));
        if (p.contains("b_over_a")) sc.b_over_a = p["b_over_a"].get<double>();
    }
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        reject_unknown(d, {"kind", "bc", "length", "lx", "ly", "n_modes", "nx_modes", "ny_modes"},
                       "domain");
        if (d.contains("kind")) sc.domain.kind = d["kind"].get<std::string>();
        if (sc.domain.kind != "interval" && sc.domain.kind != "rectangle")
            throw ConfigError("scenario: domain.kind must be interval or rectangle");
        if (d.contains("bc")) {
            const std::string b = d["bc"].get<std::string>();
            if (b == "dirichlet") sc.domain.bc = Bc::dirichlet;
            else if (b == "neumann") sc.domain.bc = Bc::neumann;
            else throw ConfigError("scenario: domain.bc must be dirichlet or neumann");
        }
        sc.domain.length = get_num(d, "length", kPi);
        sc.domain.lx = get_num(d, "lx", kPi);
        sc.domain.ly = get_num(d, "ly", kPi);
        sc.domain.n_modes = static_cast<int>(get_num(d, "n_modes", 128));
        sc.domain.nx_modes = static_cast<int>(get_num(d, "nx_modes", 64));
        sc.domain.ny_modes = static_cast<int>(get_num(d, "ny_modes", 64));
    }
    if (j.contains("data")) {
        const auto& d = j["data"];
        reject_unknown(d, {"preset", "amplitude", "mode"}, "data");
        if (d.contains("preset")) sc.data.preset = d["preset"].get<std::string>();
        sc.data.amplitude = get_num(d, "amplitude", 1.0);
        sc.data.mode = static_cast<int>(get_num(d, "mode", 1));
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        reject_unknown(s,
                       {"kind", "horizon", "dt", "eps_guard", "integrating_factor",
                        "cubic_forcing", "picard_max_iters", "picard_tol", "state_stride"},
                       "solver");
        if (s.contains("kind")) sc.solver.kind = s["kind"].get<std::string>();
        sc.solver.horizon = get_num(s, "horizon", 30.0);
        sc.solver.dt = get_num(s, "dt", 1e-3);
        sc.solver.eps_guard = get_num(s, "eps_guard", 0.5);
        if (s.contains("integrating_factor"))
            sc.solver.integrating_factor = s["integrating_factor"].get<bool>();
        if (s.contains("cubic_forcing")) sc.solver.cubic_forcing = s["cubic_forcing"].get<bool>();
        sc.solver.picard_max_iters = static_cast<int>(get_num(s, "picard_max_iters", 25));
        sc.solver.picard_tol = get_num(s, "picard_tol", 1e-10);
        sc.solver.state_stride = static_cast<int>(get_num(s, "state_stride", 0));
    }
    if (j.contains("fit")) {
        const auto& f = j["fit"];
        reject_unknown(f, {"window", "channel", "rel_tol"}, "fit");
        if (f.contains("window")) {
            sc.fit.t_begin = f["window"][0].get<double>();
            sc.fit.t_end = f["window"][1].get<double>();
        }
        if (f.contains("channel")) sc.fit.channel = f["channel"].get<std::string>();
        sc.fit.rel_tol = get_num(f, "rel_tol", 0.01);
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        reject_unknown(s, {"a", "b", "c"}, "sweep");
        SweepSpec sw;
        if (s.contains("a")) sw.a = s["a"].get<std::vector<double>>();
        if (s.contains("b")) sw.b = s["b"].get<std::vector<double>>();
        if (s.contains("c")) sw.c = s["c"].get<std::vector<double>>();
        sc.sweep = sw;
    }
    if (j.contains("p_exponent")) sc.p_exponent = parse_fraction(j["p_exponent"]);
    if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
    return sc;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string serialize_scenario(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["params"] = {{"a", sc.params.a}, {"b", sc.params.b}, {"c", sc.params.c},
                   {"k", sc.params.k}, {"s", sc.params.s}};
    if (sc.b_over_a) j["params"]["b_over_a"] = *sc.b_over_a;
    if (sc.domain.kind == "interval")
        j["domain"] = {{"kind", "interval"},
                       {"bc", sc.domain.bc == Bc::dirichlet ? "dirichlet" : "neumann"},
                       {"length", sc.domain.length},
                       {"n_modes", sc.domain.n_modes}};
    else
        j["domain"] = {{"kind", "rectangle"},
                       {"bc", sc.domain.bc == Bc::dirichlet ? "dirichlet" : "neumann"},
                       {"lx", sc.domain.lx},
                       {"ly", sc.domain.ly},
                       {"nx_modes", sc.domain.nx_modes},
                       {"ny_modes", sc.domain.ny_modes}};
    j["data"] = {{"preset", sc.data.preset}, {"amplitude", sc.data.amplitude},
                 {"mode", sc.data.mode}};
    j["solver"] = {{"kind", sc.solver.kind},
                   {"horizon", sc.solver.horizon},
                   {"dt", sc.solver.dt},
                   {"eps_guard", sc.solver.eps_guard},
                   {"integrating_factor", sc.solver.integrating_factor},
                   {"cubic_forcing", sc.solver.cubic_forcing},
                   {"picard_max_iters", sc.solver.picard_max_iters},
                   {"picard_tol", sc.solver.picard_tol},
                   {"state_stride", sc.solver.state_stride}};
    j["fit"] = {{"window", {sc.fit.t_begin, sc.fit.t_end}}, {"channel", sc.fit.channel},
                {"rel_tol", sc.fit.rel_tol}};
    if (sc.sweep)
        j["sweep"] = {{"a", sc.sweep->a}, {"b", sc.sweep->b}, {"c", sc.sweep->c}};
    j["p_exponent"] = sc.p_exponent.str();
    j["seed"] = sc.seed;
    return j.dump(2);
}

std::uint64_t scenario_hash(const Scenario& sc) {
    const std::string s = serialize_scenario(sc);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::string> preset_names() {
    return {"dirichlet-baseline", "neumann-meanzero", "big-b-accumulation", "nonlinear-small",
            "incompatible-data"};
}

namespace {

std::optional<Scenario> builtin_preset(const std::string& name) {
    Scenario sc;
    sc.name = name;
    if (name == "dirichlet-baseline") {
        sc.domain.bc = Bc::dirichlet;
        sc.domain.n_modes = 32;
        sc.data.preset = "sine";
        sc.solver.kind = "linear";
        return sc;
    }
    if (name == "neumann-meanzero") {
        sc.domain.bc = Bc::neumann;
        sc.domain.n_modes = 32;
        sc.data.preset = "cosine";
        sc.solver.kind = "linear";
        return sc;
    }
    if (name == "big-b-accumulation") {
        sc.params.b = 10.0;
        sc.domain.bc = Bc::dirichlet;
        sc.domain.n_modes = 32;
        sc.data.preset = "sine";
        sc.solver.kind = "linear";
        sc.fit.rel_tol = 0.01;
        return sc;
    }
    if (name == "nonlinear-small") {
        sc.params.k = 1.0;
        sc.params.s = 1;
        sc.domain.bc = Bc::dirichlet;
        sc.domain.n_modes = 64;
        sc.data.preset = "sine";
        sc.data.amplitude = 1e-3;
        sc.solver.kind = "nonlinear";
        return sc;
    }
    if (name == "incompatible-data") {
        sc.domain.bc = Bc::dirichlet;
        sc.domain.n_modes = 32;
        sc.data.preset = "incompatible";
        sc.data.amplitude = 1.0;
        sc.solver.kind = "linear";
        return sc;
    }
    return std::nullopt;
}

} // namespace

Scenario load_scenario(const std::string& path_or_preset) {
    if (auto p = builtin_preset(path_or_preset)) return *p;
    std::ifstream in(path_or_preset);
    if (!in) throw ConfigError("scenario: cannot open '" + path_or_preset +
                               "' (not a file, not a bundled preset)");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scenario(text);
}

DomainPtr build_domain(const DomainSpec& spec) {
    if (spec.kind == "interval")
        return SpectralDomain::interval(spec.bc, spec.length, spec.n_modes);
    return SpectralDomain::rectangle(spec.bc, spec.lx, spec.ly, spec.nx_modes, spec.ny_modes);
}

PdeParams effective_params(const Scenario& sc) {
    if (sc.b_over_a)
        return PdeParams::from_b_over_a(sc.params.a, sc.params.b, sc.params.c, *sc.b_over_a,
                                        sc.params.s);
    PdeParams p = sc.params;
    p.validate();
    return p;
}

ProblemData build_data(const Scenario& sc, const DomainPtr& dom) {
    ProblemData data;
    data.p_exponent = sc.p_exponent;
    data.g = BoundaryData::zero(*dom);
    data.h = BoundaryData::zero(*dom);
    const double amp = sc.data.amplitude;
    const int mode = sc.data.mode;
    const auto& preset = sc.data.preset;

    if (preset == "zero") return data;

    if (preset == "sine") {
        if (dom->bc() != Bc::dirichlet) throw ConfigError("data preset 'sine' needs Dirichlet");
        const double wx = mode * kPi / dom->axis(0).length();
        if (dom->dim() == 1) {
            data.u0.field = SpaceField([amp, wx](Point p) { return amp * std::sin(wx * p.x); });
            data.u0.lap = {[amp, wx](Point p) { return -wx * wx * amp * std::sin(wx * p.x); }};
        } else {
            const double wy = mode * kPi / dom->axis(1).length();
            data.u0.field = SpaceField(
                [amp, wx, wy](Point p) { return amp * std::sin(wx * p.x) * std::sin(wy * p.y); });
            data.u0.lap = {[amp, wx, wy](Point p) {
                return -(wx * wx + wy * wy) * amp * std::sin(wx * p.x) * std::sin(wy * p.y);
            }};
        }
        return data;
    }
    if (preset == "cosine") {
        if (dom->bc() != Bc::neumann) throw ConfigError("data preset 'cosine' needs Neumann");
        const double wx = mode * kPi / dom->axis(0).length();
        if (dom->dim() == 1) {
            data.u0.field = SpaceField([amp, wx](Point p) { return amp * std::cos(wx * p.x); });
            data.u0.lap = {[amp, wx](Point p) { return -wx * wx * amp * std::cos(wx * p.x); }};
        } else {
            const double wy = mode * kPi / dom->axis(1).length();
            data.u0.field = SpaceField(
                [amp, wx, wy](Point p) { return amp * std::cos(wx * p.x) * std::cos(wy * p.y); });
            data.u0.lap = {[amp, wx, wy](Point p) {
                return -(wx * wx + wy * wy) * amp * std::cos(wx * p.x) * std::cos(wy * p.y);
            }};
        }
        return data;
    }
    if (preset == "incompatible") {
        if (dom->dim() != 1) throw ConfigError("data preset 'incompatible' is 1-D");
        const double wx = kPi / dom->axis(0).length();
        data.u0.field =
            SpaceField([amp, wx](Point p) { return amp * (std::sin(wx * p.x) + 0.1 * p.x); });
        data.u0.lap = {[amp, wx](Point p) { return -wx * wx * amp * std::sin(wx * p.x); }};
        return data;
    }
    if (preset == "neumann-forced") {
        // mean-split demo: zero-trace initial state, interior forcing with
        // nonzero mean and slope-compatible boundary data g(0) = g_t(0) = 0
        if (dom->bc() != Bc::neumann) throw ConfigError("preset 'neumann-forced' needs Neumann");
        const double wx = kPi / dom->axis(0).length();
        data.u0.field = SpaceField([amp, wx](Point p) { return amp * std::cos(wx * p.x); });
        data.u0.lap = {[amp, wx](Point p) { return -wx * wx * amp * std::cos(wx * p.x); }};
        data.f = SpaceTimeField([amp, wx](double t, Point p) {
            return amp * std::exp(-0.3 * t) * (1.0 + 0.5 * std::cos(wx * p.x));
        });
        const int nc = boundary_component_count(*dom);
        data.g.comps.assign(nc, TimeSignal([amp](double t) {
            return 0.2 * amp * t * t * std::exp(-t);
        }));
        data.h.comps.assign(nc, TimeSignal([amp](double t) {
            return 0.1 * amp * t * t * std::exp(-0.5 * t);
        }));
        return data;
    }
    throw ConfigError("scenario: unknown data preset '" + preset + "'");
}

} // namespace bcx
