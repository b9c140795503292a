#include <array>
#include <atomic>
// blackstock: spectral simulation and analysis of the Blackstock-Crighton
// equations on intervals and rectangles.

#include "bcx/compatibility.hpp"
#include "bcx/decay.hpp"
#include "bcx/errors.hpp"
#include "bcx/extension.hpp"
#include "bcx/linear_solvers.hpp"
#include "bcx/nonlinear.hpp"
#include "bcx/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bcx;

namespace {

int log_level() {
    const char* v = std::getenv("BLACKSTOCK_LOG");
    if (!v) return 0;
    return std::atoi(v);
}

void log_info(const std::string& msg) {
    if (log_level() > 0) std::cerr << "[blackstock] " << msg << "\n";
}

void write_atomic(const fs::path& path, const std::string& body) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << body;
    }
    fs::rename(tmp, path);
}

std::string metadata_header(const Scenario& sc) {
    std::ostringstream os;
    os << "# blackstock 1.0\n";
    os << "# scenario " << sc.name << " hash " << std::hex << scenario_hash(sc) << std::dec
       << "\n";
    os << "# seed " << sc.seed << "\n";
    return os.str();
}

std::string trajectory_csv(const Scenario& sc, const Trajectory& traj, bool guard) {
    std::ostringstream os;
    os << metadata_header(sc);
    os << "time,L2_norm_u,L2_norm_ut,L2_norm_utt,H2_norm_u,mean_u";
    if (guard) os << ",guard_min";
    os << "\n";
    const auto& n = traj.norms;
    for (size_t i = 0; i < n.t.size(); ++i) {
        os << fmt17(n.t[i]) << ',' << fmt17(n.l2_u[i]) << ',' << fmt17(n.l2_ut[i]) << ','
           << fmt17(n.l2_utt[i]) << ',' << fmt17(n.h2_u[i]) << ',' << fmt17(n.mean_u[i]);
        if (guard) os << ',' << fmt17(n.guard_min[i]);
        os << "\n";
    }
    return os.str();
}

json compat_to_json(const CompatReport& rep) {
    json out;
    out["pass"] = rep.pass;
    out["conditions"] = json::array();
    for (const auto& c : rep.conditions) {
        json jc;
        jc["id"] = c.id;
        jc["description"] = c.description;
        jc["residual"] = c.residual;
        jc["threshold"] = c.threshold;
        jc["pass"] = c.pass;
        jc["informational"] = c.informational;
        out["conditions"].push_back(jc);
    }
    return out;
}

int cmd_spectrum(const Scenario& sc, const fs::path& outdir) {
    const PdeParams p = effective_params(sc);
    auto dom = build_domain(sc.domain);
    std::ostringstream os;
    os << metadata_header(sc);
    os << "mode_index,lambda,re_mu1,im_mu1,re_mu2,im_mu2,mu3\n";
    int idx = 0;
    for (const auto& [lam, mi] : dom->eigenpairs()) {
        auto mu = mode_eigenvalues(mode_matrix(lam, p));
        os << idx++ << ',' << fmt17(lam) << ',' << fmt17(mu[0].real()) << ','
           << fmt17(mu[0].imag()) << ',' << fmt17(mu[1].real()) << ',' << fmt17(mu[1].imag())
           << ',' << fmt17(mu[2].real()) << "\n";
    }
    write_atomic(outdir / "spectrum.csv", os.str());

    json rep;
    const bool meanzero = dom->bc() == Bc::neumann;
    auto om = omega0(p, *dom);
    auto ab = spectral_abscissa(p, *dom, meanzero);
    rep["omega0"] = om.omega0;
    rep["lambda_star"] = om.lambda_star;
    rep["attained"] = om.attaining_mode.has_value();
    rep["abscissa_numeric"] = ab.numeric;
    rep["abscissa_analytic"] = ab.analytic;
    write_atomic(outdir / "omega0.json", rep.dump(2) + "\n");
    std::cout << "omega0 = " << om.omega0
              << (om.attaining_mode ? " (attained at a retained mode)" : " (accumulation at infinity)")
              << "\n";
    return 0;
}

int cmd_simulate(const Scenario& sc, const fs::path& outdir, const std::string& mode, bool force) {
    const PdeParams p = effective_params(sc);
    auto dom = build_domain(sc.domain);
    ProblemData data = build_data(sc, dom);
    TimeGrid grid;
    grid.dt = sc.solver.dt;
    grid.n_steps = static_cast<int>(std::llround(sc.solver.horizon / sc.solver.dt));

    Trajectory traj;
    bool guard_channel = false;
    if (mode == "linear") {
        SolveOptions opt;
        opt.check_compat = !force;
        opt.cubic_forcing = sc.solver.cubic_forcing;
        opt.state_stride = sc.solver.state_stride;
        traj = solve_bc_linear(data, dom, grid, p, opt);
    } else if (mode == "direct-modal") {
        SolveOptions opt;
        opt.state_stride = sc.solver.state_stride;
        traj = solve_direct_modal(data, dom, grid, p, opt);
    } else {
        SimConfig cfg;
        cfg.params = p;
        cfg.domain = dom;
        cfg.horizon = sc.solver.horizon;
        cfg.dt = sc.solver.dt;
        cfg.eps_guard = sc.solver.eps_guard;
        cfg.integrating_factor = sc.solver.integrating_factor;
        cfg.check_compat = !force;
        cfg.state_stride = sc.solver.state_stride;
        cfg.picard.max_iters = sc.solver.picard_max_iters;
        cfg.picard.tol = sc.solver.picard_tol;
        if (mode == "nonlinear") {
            traj = simulate(cfg, data);
            guard_channel = true;
        } else if (mode == "picard") {
            traj = picard_solve(cfg, data);
        } else {
            throw ConfigError("simulate: unknown mode " + mode);
        }
    }
    write_atomic(outdir / "trajectory.csv", trajectory_csv(sc, traj, guard_channel));
    log_info("trajectory written (" + std::to_string(traj.norms.t.size()) + " samples)");

    // attach the decay fit configured in the scenario
    try {
        auto fit = fit_decay_robust(traj.norms, sc.fit.channel, sc.fit.t_begin, sc.fit.t_end);
        auto cmp = compare_omega0(fit.rate, p, *dom, sc.fit.rel_tol);
        json rep;
        rep["channel"] = sc.fit.channel;
        rep["rate"] = fit.rate;
        rep["amplitude"] = fit.amplitude;
        rep["r2"] = fit.r2;
        rep["omega0"] = cmp.omega0;
        rep["slowest_mode_rate"] = cmp.slowest_mode_rate;
        rep["pass"] = cmp.pass;
        write_atomic(outdir / "fit.json", rep.dump(2) + "\n");
        std::cout << "fitted rate " << fit.rate << " vs omega0 " << cmp.omega0 << " -> "
                  << (cmp.pass ? "PASS" : "FAIL") << "\n";
    } catch (const std::exception& e) {
        log_info(std::string("fit skipped: ") + e.what());
    }
    return 0;
}

int cmd_compat(const Scenario& sc, const fs::path& outdir, const std::string& problem) {
    auto dom = build_domain(sc.domain);
    ProblemData data = build_data(sc, dom);
    CompatReport rep;
    if (problem == "dirichlet") {
        rep = dirichlet_compat(data, dom, 1e-8);
    } else if (problem == "neumann") {
        rep = neumann_compat(data, dom, 1e-8);
    } else if (problem == "heat") {
        rep = heat_higher_compat(data.f, data.f_lap, data.g, data.u0, 1.0, 1, 2,
                                 data.p_exponent, dom, 1e-8);
    } else {
        throw ConfigError("compat-check: problem must be dirichlet, neumann or heat");
    }
    write_atomic(outdir / "compat.json", compat_to_json(rep).dump(2) + "\n");
    std::cout << (rep.pass ? "PASS" : "FAIL") << " (" << rep.conditions.size()
              << " conditions)\n";
    return rep.pass ? 0 : 2;
}

int cmd_decay(const Scenario& sc, const fs::path& outdir, const std::string& input) {
    // consume a trajectory CSV produced by simulate
    std::ifstream in(input);
    if (!in) throw ConfigError("decay: cannot open " + input);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> cols;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (header.empty()) {
            while (std::getline(ss, cell, ',')) header.push_back(cell);
            cols.resize(header.size());
            continue;
        }
        size_t i = 0;
        while (std::getline(ss, cell, ',')) cols[i++].push_back(std::stod(cell));
    }
    if (header.empty()) throw ConfigError("decay: empty file");
    const std::string want = sc.fit.channel == "l2_u" ? "L2_norm_u" : sc.fit.channel;
    int ci = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == want || header[i] == sc.fit.channel) ci = static_cast<int>(i);
    if (ci < 0) throw ConfigError("decay: channel '" + want + "' not in file");

    auto fit = fit_decay_robust(cols[0], cols[ci], sc.fit.t_begin, sc.fit.t_end);
    const PdeParams p = effective_params(sc);
    auto dom = build_domain(sc.domain);
    auto cmp = compare_omega0(fit.rate, p, *dom, sc.fit.rel_tol);

    json rep;
    rep["rate"] = fit.rate;
    rep["amplitude"] = fit.amplitude;
    rep["r2"] = fit.r2;
    rep["exponential"] = fit.exponential;
    rep["omega0"] = cmp.omega0;
    rep["slowest_mode_rate"] = cmp.slowest_mode_rate;
    rep["verdict"] = cmp.pass ? "PASS" : "FAIL";
    write_atomic(outdir / "decay.json", rep.dump(2) + "\n");

    std::ostringstream os;
    os << metadata_header(sc);
    os << "time,log_norm,fit_line\n";
    for (size_t i = 0; i < cols[0].size(); ++i) {
        const double t = cols[0][i];
        if (t < sc.fit.t_begin || t > sc.fit.t_end || cols[ci][i] <= 1e-14) continue;
        os << fmt17(t) << ',' << fmt17(std::log(cols[ci][i])) << ','
           << fmt17(std::log(fit.amplitude) - fit.rate * t) << "\n";
    }
    write_atomic(outdir / "decay_fit.csv", os.str());
    std::cout << (cmp.pass ? "PASS" : "FAIL") << ": rate " << fit.rate << " vs omega0 "
              << cmp.omega0 << "\n";
    return cmp.pass ? 0 : 2;
}

int cmd_extend(const Scenario& sc, const fs::path& outdir, int order) {
    auto dom = build_domain(sc.domain);
    std::vector<GridFunction> xs;
    for (int j = 0; j <= order; ++j) {
        std::vector<double> c(dom->total_modes(), 0.0);
        c[j % dom->total_modes()] = sc.data.amplitude;
        xs.push_back(GridFunction::from_coeffs(dom, std::move(c)));
    }
    TimeGrid grid;
    grid.dt = sc.solver.dt;
    grid.n_steps = static_cast<int>(std::llround(sc.solver.horizon / sc.solver.dt));
    auto ext = extend(xs, grid);

    // derivatives at t = 0 recovered by one-sided differences on the series
    json rep;
    rep["order"] = order;
    rep["n_modes"] = dom->total_modes();
    json derivs = json::array();
    for (int j = 0; j <= order; ++j) {
        TimeGrid fine{0.0, 1e-3, 16};
        auto fser = extend(xs, fine);
        std::vector<double> vals(fine.size());
        std::vector<double> recovered(dom->total_modes());
        double max_err = 0.0;
        for (int m = 0; m < dom->total_modes(); ++m) {
            for (int i = 0; i < fine.size(); ++i) vals[i] = fser.coeff_series[i][m];
            TimeSignal sig = TimeSignal::sampled(fine, vals);
            const double want = xs[j].coeffs()[m];
            recovered[m] = j == 0 ? vals[0] : sig.deriv0(j);
            max_err = std::max(max_err, std::abs(recovered[m] - want));
        }
        json jc;
        jc["j"] = j;
        jc["prescribed_l2"] = xs[j].l2_norm();
        jc["recovered_l2"] = dom->l2_norm(recovered);
        jc["recovered_coeffs"] = recovered;
        jc["max_abs_error"] = max_err;
        derivs.push_back(jc);
    }
    rep["derivatives_at_zero"] = derivs;
    json series = json::array();
    for (int i = 0; i < grid.size(); ++i) {
        double nrm = dom->l2_norm(ext.coeff_series[i]);
        series.push_back({{"t", grid.time(i)}, {"l2", nrm}});
        if (series.size() >= 200) break;
    }
    rep["series"] = series;
    write_atomic(outdir / "extend.json", rep.dump(2) + "\n");
    std::cout << "extension computed, order " << order << "\n";
    return 0;
}

int cmd_sweep(const Scenario& sc, const fs::path& outdir, int threads) {
    if (!sc.sweep) throw ConfigError("sweep: scenario has no sweep section");
    std::vector<std::array<double, 3>> combos;
    auto list = [](const std::vector<double>& v, double dflt) {
        return v.empty() ? std::vector<double>{dflt} : v;
    };
    for (double a : list(sc.sweep->a, sc.params.a))
        for (double b : list(sc.sweep->b, sc.params.b))
            for (double c : list(sc.sweep->c, sc.params.c)) combos.push_back({a, b, c});

    std::vector<std::string> rows(combos.size());
    std::mutex err_mutex;
    std::string first_error;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= combos.size()) return;
            try {
                Scenario run = sc;
                run.params.a = combos[i][0];
                run.params.b = combos[i][1];
                run.params.c = combos[i][2];
                run.sweep.reset();
                const PdeParams p = effective_params(run);
                auto dom = build_domain(run.domain);
                ProblemData data = build_data(run, dom);
                TimeGrid grid;
                grid.dt = run.solver.dt;
                grid.n_steps = static_cast<int>(std::llround(run.solver.horizon / run.solver.dt));
                auto traj = solve_bc_linear(data, dom, grid, p, {});
                auto fit = fit_decay_robust(traj.norms, run.fit.channel, run.fit.t_begin, run.fit.t_end);
                auto cmp = compare_omega0(fit.rate, p, *dom, run.fit.rel_tol);
                std::ostringstream os;
                os << fmt17(p.a) << ',' << fmt17(p.b) << ',' << fmt17(p.c) << ','
                   << fmt17(cmp.omega0) << ',' << fmt17(cmp.slowest_mode_rate) << ','
                   << fmt17(fit.rate) << ',' << (cmp.pass ? "PASS" : "FAIL");
                rows[i] = os.str();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (first_error.empty()) first_error = e.what();
                rows[i] = "error";
            }
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::max(1, threads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (!first_error.empty()) log_info("sweep errors: " + first_error);

    std::ostringstream os;
    os << metadata_header(sc);
    os << "a,b,c,omega0,slowest_mode_rate,measured_rate,verdict\n";
    for (const auto& r : rows) os << r << "\n";
    write_atomic(outdir / "sweep.csv", os.str());
    std::cout << combos.size() << " sweep points written\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blackstock: Blackstock-Crighton spectral toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string scenario_path = "dirichlet-baseline";
    std::string outdir = "out";
    int threads = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool force = false;
    app.add_option("--scenario", scenario_path, "scenario file or bundled preset name");
    app.add_option("--out", outdir, "output directory");
    app.add_option("--threads", threads, "worker threads (sweep)");
    auto* seed_opt = app.add_option("--seed", seed, "override scenario seed");
    app.add_flag("--force", force, "skip the compatibility gate");

    auto* spectrum = app.add_subcommand("spectrum", "per-mode spectra and omega0 report");
    std::string sim_mode = "linear";
    auto* simulate_cmd = app.add_subcommand("simulate", "run a simulation");
    bool m_linear = false, m_nonlinear = false, m_picard = false, m_direct = false;
    simulate_cmd->add_flag("--linear", m_linear, "composed linear solver");
    simulate_cmd->add_flag("--nonlinear", m_nonlinear, "direct quasilinear solver");
    simulate_cmd->add_flag("--picard", m_picard, "fixed-point solver");
    simulate_cmd->add_flag("--direct-modal", m_direct, "per-mode 3x3 linear propagation");
    auto* compat = app.add_subcommand("compat-check", "validate data compatibility");
    std::string problem = "dirichlet";
    compat->add_option("--problem", problem, "dirichlet | neumann | heat");
    auto* decay_cmd = app.add_subcommand("decay", "fit decay rates from a trajectory CSV");
    std::string input = "out/trajectory.csv";
    decay_cmd->add_option("--input", input, "trajectory CSV path");
    auto* extend_cmd = app.add_subcommand("extend", "prescribed-derivative extension demo");
    int order = 2;
    extend_cmd->add_option("--order", order, "highest prescribed derivative");
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep over (a, b, c)");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        Scenario sc = load_scenario(scenario_path);
        if (seed_set) sc.seed = seed;
        const fs::path out(outdir);
        if (spectrum->parsed()) return cmd_spectrum(sc, out);
        if (simulate_cmd->parsed()) {
            if (m_nonlinear) sim_mode = "nonlinear";
            else if (m_picard) sim_mode = "picard";
            else if (m_direct) sim_mode = "direct-modal";
            else if (m_linear) sim_mode = "linear";
            else sim_mode = sc.solver.kind; // fall back to the scenario's choice
            return cmd_simulate(sc, out, sim_mode, force);
        }
        if (compat->parsed()) return cmd_compat(sc, out, problem);
        if (decay_cmd->parsed()) return cmd_decay(sc, out, input);
        if (extend_cmd->parsed()) return cmd_extend(sc, out, order);
        if (sweep_cmd->parsed()) return cmd_sweep(sc, out, threads);
        throw ConfigError("no subcommand");
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
