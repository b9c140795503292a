#include "bcx/nonlinear.hpp"

#include "bcx/compatibility.hpp"
#include "bcx/decay.hpp"
#include "bcx/errors.hpp"

#include <cmath>
#include <limits>

namespace bcx {

namespace {

Mat companion(double lam, const PdeParams& p) {
    const double c2 = p.c * p.c;
    Mat m(3, 3);
    m(0, 1) = 1.0;
    m(1, 2) = 1.0;
    m(2, 0) = -p.a * c2 * lam * lam;
    m(2, 1) = -(c2 * lam + p.a * p.b * lam * lam);
    m(2, 2) = -(p.a + p.b) * lam;
    return m;
}

void linear_rhs_coeffs(const SpectralDomain& dom, const PdeParams& p,
                       std::span<const double> u, std::span<const double> ut,
                       std::span<const double> utt, std::span<double> out) {
    const double c2 = p.c * p.c;
    for (int m = 0; m < dom.total_modes(); ++m) {
        const double lam = dom.eigenvalue_flat(m);
        out[m] = -(p.a + p.b) * lam * utt[m] - (c2 * lam + p.a * p.b * lam * lam) * ut[m] -
                 p.a * c2 * lam * lam * u[m];
    }
}

struct GuardViolation {
    bool violated = false;
    double value = 0.0;
    Point where;
};

// Nonlinear correction n with rhs = L u - n, evaluated on the fine grid:
// n = Pr[ (N + (G - 1) L u) / G ],  N = 2k utt^2 + 2s|grad ut|^2
//                                       + 2s grad u . grad utt,  G = 1 + 2k ut.
// The split keeps the k = s = 0 limit exact in spectral space.
std::vector<double> correction_coeffs(const SpectralDomain& dom, const PdeParams& p,
                                      std::span<const double> u, std::span<const double> ut,
                                      std::span<const double> utt,
                                      std::span<const double> lsp, double eps_guard,
                                      double* guard_min, GuardViolation* gv) {
    const int nf = dom.fine_grid_size();
    std::vector<double> nl(nf, 0.0);

    std::vector<double> ut_f = dom.inverse_fine(ut);
    double gmin = 1.0;
    int gmin_at = 0;
    if (p.k != 0.0) {
        for (int i = 0; i < nf; ++i) {
            const double g = 1.0 + 2.0 * p.k * ut_f[i];
            if (g < gmin) {
                gmin = g;
                gmin_at = i;
            }
        }
    }
    if (guard_min) *guard_min = std::min(*guard_min, gmin);
    if (gmin < eps_guard) {
        if (gv) {
            gv->violated = true;
            gv->value = gmin;
            gv->where = dom.fine_grid_points()[gmin_at];
        }
        return {};
    }

    if (p.k != 0.0) {
        auto utt_f = dom.inverse_fine(utt);
        for (int i = 0; i < nf; ++i) nl[i] += 2.0 * p.k * utt_f[i] * utt_f[i];
    }
    if (p.s != 0) {
        auto gu = dom.gradient_fine(u);
        auto gut = dom.gradient_fine(ut);
        auto gutt = dom.gradient_fine(utt);
        for (int d = 0; d < dom.dim(); ++d)
            for (int i = 0; i < nf; ++i)
                nl[i] += 2.0 * (gut[d][i] * gut[d][i] + gu[d][i] * gutt[d][i]);
    }
    if (p.k != 0.0) {
        auto lsp_f = dom.inverse_fine(lsp);
        for (int i = 0; i < nf; ++i) {
            const double g = 1.0 + 2.0 * p.k * ut_f[i];
            nl[i] = (nl[i] + (g - 1.0) * lsp_f[i]) / g;
        }
    }
    return dom.forward_fine(nl);
}

} // namespace

TimeGrid SimConfig::time_grid() const {
    TimeGrid g;
    g.t0 = 0.0;
    g.dt = dt;
    g.n_steps = static_cast<int>(std::llround(horizon / dt));
    return g;
}

void SimConfig::validate() const {
    params.validate();
    if (!domain) throw ConfigError("SimConfig: no domain");
    if (dt <= 0.0 || horizon <= 0.0) throw ConfigError("SimConfig: dt and horizon must be positive");
    if (eps_guard <= 0.0 || eps_guard >= 1.0)
        throw ConfigError("SimConfig: eps_guard must lie in (0, 1)");
}

GridFunction rhs_expanded(const FieldState& state, const PdeParams& p, double eps_guard) {
    const auto dom = state.u.domain();
    const auto& u = state.u.coeffs();
    const auto& ut = state.ut.coeffs();
    const auto& utt = state.utt.coeffs();
    std::vector<double> lsp(dom->total_modes());
    linear_rhs_coeffs(*dom, p, u, ut, utt, lsp);
    GuardViolation gv;
    double gmin = 1.0;
    auto n = correction_coeffs(*dom, p, u, ut, utt, lsp, eps_guard, &gmin, &gv);
    if (gv.violated)
        throw NumericalError("rhs_expanded: nonlinearity degenerate, 1 + 2k u_t = " +
                             std::to_string(gv.value) + " at x = " + std::to_string(gv.where.x) +
                             (dom->dim() == 2 ? ", y = " + std::to_string(gv.where.y) : ""));
    if (!n.empty())
        for (int m = 0; m < dom->total_modes(); ++m) lsp[m] -= n[m];
    return GridFunction::from_coeffs(dom, std::move(lsp));
}

NonlinearStepper::NonlinearStepper(const SimConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const auto& dom = *cfg_.domain;
    const double h = cfg_.dt;
    e_full_.reserve(dom.total_modes());
    e_half_.reserve(dom.total_modes());
    for (int m = 0; m < dom.total_modes(); ++m) {
        Mat c = companion(dom.eigenvalue_flat(m), cfg_.params);
        e_full_.push_back(expm(c.scaled(h)));
        e_half_.push_back(expm(c.scaled(h / 2.0)));
    }
}

std::vector<double> NonlinearStepper::nonlinear_correction(const NonlinearState& s) const {
    const auto& dom = *cfg_.domain;
    const auto& p = cfg_.params;
    if (p.k == 0.0 && p.s == 0) return {};
    std::vector<double> lsp(dom.total_modes());
    linear_rhs_coeffs(dom, p, s.u, s.ut, s.utt, lsp);
    GuardViolation gv;
    auto n = correction_coeffs(dom, p, s.u, s.ut, s.utt, lsp, cfg_.eps_guard, &guard_min_, &gv);
    if (gv.violated)
        throw NumericalError("nonlinear step: guard 1 + 2k u_t = " + std::to_string(gv.value) +
                             " fell below eps_guard at x = " + std::to_string(gv.where.x));
    return n;
}

void NonlinearStepper::add_linear(const NonlinearState& s, std::vector<double>& out) const {
    const auto& dom = *cfg_.domain;
    std::vector<double> lsp(dom.total_modes());
    linear_rhs_coeffs(dom, cfg_.params, s.u, s.ut, s.utt, lsp);
    for (int m = 0; m < dom.total_modes(); ++m) out[m] += lsp[m];
}

namespace {

NonlinearState apply_mode(const std::vector<Mat>& e, const NonlinearState& s) {
    const int nm = static_cast<int>(s.u.size());
    NonlinearState out;
    out.u.resize(nm);
    out.ut.resize(nm);
    out.utt.resize(nm);
    for (int m = 0; m < nm; ++m) {
        const Mat& g = e[m];
        const double y0 = s.u[m], y1 = s.ut[m], y2 = s.utt[m];
        out.u[m] = g(0, 0) * y0 + g(0, 1) * y1 + g(0, 2) * y2;
        out.ut[m] = g(1, 0) * y0 + g(1, 1) * y1 + g(1, 2) * y2;
        out.utt[m] = g(2, 0) * y0 + g(2, 1) * y1 + g(2, 2) * y2;
    }
    return out;
}

// state += w * N where N = (0, 0, -n) per mode.
void add_nl(NonlinearState& s, const std::vector<double>& n, double w) {
    if (n.empty()) return;
    for (size_t m = 0; m < s.utt.size(); ++m) s.utt[m] -= w * n[m];
}

// state += w * E N, using the third column of each per-mode exponential.
void add_nl_mapped(NonlinearState& s, const std::vector<Mat>& e, const std::vector<double>& n,
                   double w) {
    if (n.empty()) return;
    for (size_t m = 0; m < s.utt.size(); ++m) {
        const Mat& g = e[m];
        const double v = -w * n[m];
        s.u[m] += g(0, 2) * v;
        s.ut[m] += g(1, 2) * v;
        s.utt[m] += g(2, 2) * v;
    }
}

} // namespace

NonlinearState NonlinearStepper::step(const NonlinearState& s) const {
    const double h = cfg_.dt;
    const int nm = static_cast<int>(s.u.size());

    if (cfg_.integrating_factor) {
        // Lawson RK4: exact linear flow, RK4 on the projected nonlinear
        // correction N(y) = (0, 0, -n).
        auto k1 = nonlinear_correction(s);

        NonlinearState s2 = s;
        add_nl(s2, k1, h / 2.0);
        s2 = apply_mode(e_half_, s2);
        auto k2 = nonlinear_correction(s2);

        NonlinearState s3 = apply_mode(e_half_, s);
        add_nl(s3, k2, h / 2.0);
        auto k3 = nonlinear_correction(s3);

        NonlinearState s4 = apply_mode(e_full_, s);
        add_nl_mapped(s4, e_half_, k3, h);
        auto k4 = nonlinear_correction(s4);

        NonlinearState out = apply_mode(e_full_, s);
        add_nl_mapped(out, e_full_, k1, h / 6.0);
        add_nl_mapped(out, e_half_, k2, h / 3.0);
        add_nl_mapped(out, e_half_, k3, h / 3.0);
        add_nl(out, k4, h / 6.0);
        return out;
    }

    // plain RK4 on the full right-hand side
    auto full_rhs = [&](const NonlinearState& st) {
        NonlinearState k;
        k.u = st.ut;
        k.ut = st.utt;
        k.utt.assign(nm, 0.0);
        add_linear(st, k.utt);
        auto n = nonlinear_correction(st);
        if (!n.empty())
            for (int m = 0; m < nm; ++m) k.utt[m] -= n[m];
        return k;
    };
    auto add_scaled = [&](const NonlinearState& a, double w, const NonlinearState& b) {
        NonlinearState out = a;
        for (int m = 0; m < nm; ++m) {
            out.u[m] += w * b.u[m];
            out.ut[m] += w * b.ut[m];
            out.utt[m] += w * b.utt[m];
        }
        return out;
    };
    auto k1 = full_rhs(s);
    auto k2 = full_rhs(add_scaled(s, h / 2.0, k1));
    auto k3 = full_rhs(add_scaled(s, h / 2.0, k2));
    auto k4 = full_rhs(add_scaled(s, h, k3));
    NonlinearState out = s;
    for (int m = 0; m < nm; ++m) {
        out.u[m] += h / 6.0 * (k1.u[m] + 2.0 * k2.u[m] + 2.0 * k3.u[m] + k4.u[m]);
        out.ut[m] += h / 6.0 * (k1.ut[m] + 2.0 * k2.ut[m] + 2.0 * k3.ut[m] + k4.ut[m]);
        out.utt[m] += h / 6.0 * (k1.utt[m] + 2.0 * k2.utt[m] + 2.0 * k3.utt[m] + k4.utt[m]);
    }
    return out;
}

Trajectory simulate(const SimConfig& cfg, const ProblemData& data) {
    cfg.validate();
    const auto& dom = cfg.domain;
    if (!data.g.all_zero_constant() || !data.h.all_zero_constant())
        throw ConfigError(
            "simulate: the direct quasilinear solver requires homogeneous boundary data "
            "(the truncated basis enforces both traces); use picard_solve instead");
    if (cfg.check_compat) {
        CompatReport rep = dom->bc() == Bc::dirichlet ? dirichlet_compat(data, dom, 1e-6)
                                                      : neumann_compat(data, dom, 1e-6);
        if (!rep.pass)
            throw ValidationError("simulate: compatibility check failed: " + rep.first_failure());
    }

    const TimeGrid grid = cfg.time_grid();
    NonlinearStepper stepper(cfg);

    NonlinearState s;
    {
        auto proj = [&](const SpaceField& u) {
            if (u.is_zero()) return std::vector<double>(dom->total_modes(), 0.0);
            if (u.is_analytic()) {
                std::vector<double> v(dom->fine_grid_size());
                const auto& pts = dom->fine_grid_points();
                for (size_t i = 0; i < pts.size(); ++i) v[i] = u.eval(pts[i]);
                return dom->forward_fine(v);
            }
            return u.discretize(dom).coeffs();
        };
        s.u = proj(data.u0.field);
        s.ut = proj(data.u1.field);
        s.utt = proj(data.u2.field);
    }

    Trajectory traj;
    traj.grid = grid;
    traj.domain = dom;

    auto emit = [&](int i, const NonlinearState& st) {
        traj.norms.t.push_back(grid.time(i));
        traj.norms.l2_u.push_back(sobolev_norm(*dom, st.u, 0.0));
        traj.norms.l2_ut.push_back(sobolev_norm(*dom, st.ut, 0.0));
        traj.norms.l2_utt.push_back(sobolev_norm(*dom, st.utt, 0.0));
        traj.norms.h2_u.push_back(sobolev_norm(*dom, st.u, 2.0));
        traj.norms.h4_u.push_back(sobolev_norm(*dom, st.u, 4.0));
        traj.norms.mean_u.push_back(dom->mean(st.u));
        traj.norms.guard_min.push_back(stepper.last_guard_min());
        if (cfg.state_stride > 0 && (i % cfg.state_stride == 0 || i == grid.n_steps)) {
            FieldState fs;
            fs.time = grid.time(i);
            fs.u = GridFunction::from_coeffs(dom, st.u);
            fs.ut = GridFunction::from_coeffs(dom, st.ut);
            fs.utt = GridFunction::from_coeffs(dom, st.utt);
            traj.states.push_back(std::move(fs));
        }
    };

    emit(0, s);
    for (int i = 0; i < grid.n_steps; ++i) {
        s = stepper.step(s);
        if (!std::isfinite(s.u[0]) || !std::isfinite(s.utt.back()))
            throw NumericalError("simulate: NaN detected at t = " + std::to_string(grid.time(i + 1)));
        emit(i + 1, s);
    }
    return traj;
}

Trajectory picard_solve(const SimConfig& cfg, const ProblemData& data) {
    cfg.validate();
    const auto& dom = cfg.domain;
    const auto& p = cfg.params;
    const TimeGrid grid = cfg.time_grid();
    const int nm = dom->total_modes();
    const int nf = dom->fine_grid_size();
    const int nt = grid.size();

    ProblemData lin = data;
    lin.f = SpaceTimeField(); // the nonlinear problem carries no external forcing
    SolveOptions opt;
    opt.check_compat = cfg.check_compat;
    LinearSolution star = solve_bc_linear_full(lin, dom, grid, p, opt);

    // Homogeneous correction iterate, stored as modal series.
    std::vector<std::vector<double>> bu(nt, std::vector<double>(nm, 0.0));  // u_bullet
    std::vector<std::vector<double>> but(nt, std::vector<double>(nm, 0.0)); // d_t u_bullet

    // Per-mode 3x3 homogeneous-data flow for the correction solve.
    std::vector<Mat> flows;
    flows.reserve(nm);
    for (int m = 0; m < nm; ++m) {
        Mat a = mode_matrix(dom->eigenvalue_flat(m), p).matrix.scaled(-1.0);
        Mat k(7, 7);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) k(i, j) = a(i, j);
        k(2, 3) = 1.0;
        k(3, 4) = 1.0;
        k(4, 5) = 1.0;
        k(5, 6) = 1.0;
        flows.push_back(expm(k.scaled(grid.dt)).block(0, 0, 3, 7));
    }

    double prev_diff = std::numeric_limits<double>::infinity();
    int grow_streak = 0;
    TimeGrid tg = grid;

    for (int iter = 0; iter < cfg.picard.max_iters; ++iter) {
        // N(t) = k (u_t)^2 + s |grad u|^2 on the fine grid, u = u_star + u_bullet
        std::vector<std::vector<double>> nser(nt, std::vector<double>(nf, 0.0));
        for (int i = 0; i < nt; ++i) {
            auto ut_f = star.fine_ut(i);
            {
                auto bu_t = dom->inverse_fine(but[i]);
                for (int j = 0; j < nf; ++j) ut_f[j] += bu_t[j];
            }
            auto& row = nser[i];
            if (p.k != 0.0)
                for (int j = 0; j < nf; ++j) row[j] += p.k * ut_f[j] * ut_f[j];
            if (p.s != 0) {
                auto gu = star.fine_grad_u(i);
                auto gb = dom->gradient_fine(bu[i]);
                for (int d = 0; d < dom->dim(); ++d)
                    for (int j = 0; j < nf; ++j) {
                        const double tot = gu[d][j] + gb[d][j];
                        row[j] += tot * tot;
                    }
            }
        }
        // N_tt by two fourth-order differentiation passes along time
        std::vector<double> col(nt);
        for (int j = 0; j < nf; ++j) {
            for (int i = 0; i < nt; ++i) col[i] = nser[i][j];
            auto d1 = series_derivative(tg, col);
            auto d2 = series_derivative(tg, d1);
            for (int i = 0; i < nt; ++i) nser[i][j] = d2[i];
        }
        // modal forcing F = (0, 0, -N_tt) and derivative by series difference
        std::vector<std::vector<double>> fser(nt);
        for (int i = 0; i < nt; ++i) {
            fser[i] = dom->forward_fine(nser[i]);
            for (auto& v : fser[i]) v = -v;
        }
        std::vector<std::vector<double>> fder(nt, std::vector<double>(nm));
        {
            std::vector<double> fc(nt);
            for (int m = 0; m < nm; ++m) {
                for (int i = 0; i < nt; ++i) fc[i] = fser[i][m];
                auto dd = series_derivative(tg, fc);
                for (int i = 0; i < nt; ++i) fder[i][m] = dd[i];
            }
        }

        // homogeneous linear solve for the new correction
        std::vector<std::vector<double>> nu(nt, std::vector<double>(nm, 0.0));
        std::vector<std::vector<double>> nut(nt, std::vector<double>(nm, 0.0));
        std::vector<double> y(static_cast<size_t>(nm) * 3, 0.0);
        auto store = [&](int i) {
            for (int m = 0; m < nm; ++m) {
                nu[i][m] = y[3 * m];
                nut[i][m] = y[3 * m + 1];
            }
        };
        store(0);
        const double h = grid.dt;
        double z[7];
        for (int i = 0; i < grid.n_steps; ++i) {
            for (int m = 0; m < nm; ++m) {
                const double f0 = fser[i][m], f1 = fser[i + 1][m];
                const double d0 = fder[i][m], d1v = fder[i + 1][m];
                const double df = f1 - f0;
                const double c2 = 3.0 * df / (h * h) - (2.0 * d0 + d1v) / h;
                const double c3 = -2.0 * df / (h * h * h) + (d0 + d1v) / (h * h);
                z[0] = y[3 * m];
                z[1] = y[3 * m + 1];
                z[2] = y[3 * m + 2];
                z[3] = f0;
                z[4] = d0;
                z[5] = 2.0 * c2;
                z[6] = 6.0 * c3;
                const Mat& g = flows[m];
                for (int r = 0; r < 3; ++r) {
                    double acc = 0.0;
                    for (int q = 0; q < 7; ++q) acc += g(r, q) * z[q];
                    y[3 * m + r] = acc;
                }
            }
            store(i + 1);
        }

        // convergence in the discrete sup norm of the iterate difference
        double diff = 0.0;
        for (int i = 0; i < nt; ++i)
            for (int m = 0; m < nm; ++m) diff = std::max(diff, std::abs(nu[i][m] - bu[i][m]));
        bu = std::move(nu);
        but = std::move(nut);
        if (diff <= cfg.picard.tol) break;
        if (diff > prev_diff) {
            if (++grow_streak >= 3)
                throw NumericalError(
                    "picard_solve: iterates diverge (data outside the small-data ball), "
                    "difference " + std::to_string(diff));
        } else {
            grow_streak = 0;
        }
        prev_diff = diff;
        if (iter == cfg.picard.max_iters - 1)
            throw NumericalError("picard_solve: no contraction within max iterations");
    }

    // assemble combined trajectory
    Trajectory traj;
    traj.grid = grid;
    traj.domain = dom;
    for (int i = 0; i < nt; ++i) {
        auto u = star.modal_u(i);
        auto ut = star.modal_ut(i);
        auto utt = star.modal_utt(i);
        for (int m = 0; m < nm; ++m) {
            u[m] += bu[i][m];
            ut[m] += but[i][m];
        }
        traj.norms.t.push_back(grid.time(i));
        traj.norms.l2_u.push_back(sobolev_norm(*dom, u, 0.0));
        traj.norms.l2_ut.push_back(sobolev_norm(*dom, ut, 0.0));
        traj.norms.l2_utt.push_back(sobolev_norm(*dom, utt, 0.0));
        traj.norms.h2_u.push_back(sobolev_norm(*dom, u, 2.0));
        traj.norms.h4_u.push_back(sobolev_norm(*dom, u, 4.0));
        traj.norms.mean_u.push_back(dom->mean(u) /* bullet included */);
        if (cfg.state_stride > 0 && (i % cfg.state_stride == 0 || i == grid.n_steps)) {
            FieldState fs;
            fs.time = grid.time(i);
            fs.u = GridFunction::from_coeffs(dom, std::move(u));
            fs.ut = GridFunction::from_coeffs(dom, std::move(ut));
            fs.utt = GridFunction::from_coeffs(dom, std::move(utt));
            traj.states.push_back(std::move(fs));
        }
    }
    return traj;
}

} // namespace bcx
