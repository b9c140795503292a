#include "bcx/compatibility.hpp"

#include "bcx/errors.hpp"
#include "bcx/fd.hpp"

#include <algorithm>
#include <cmath>

namespace bcx {

void CompatReport::add(CompatCondition c) {
    if (!c.informational && !c.pass) pass = false;
    conditions.push_back(std::move(c));
}

std::string CompatReport::first_failure() const {
    for (const auto& c : conditions)
        if (!c.informational && !c.pass)
            return c.id + " (residual " + std::to_string(c.residual) + ")";
    return "none";
}

const CompatCondition& CompatReport::find(const std::string& id) const {
    for (const auto& c : conditions)
        if (c.id == id) return c;
    throw ConfigError("CompatReport: no condition '" + id + "'");
}

bool CompatReport::has(const std::string& id) const {
    for (const auto& c : conditions)
        if (c.id == id) return true;
    return false;
}

std::vector<BoundarySample> boundary_samples(const SpectralDomain& dom) {
    std::vector<BoundarySample> out;
    if (dom.dim() == 1) {
        const double len = dom.axis(0).length();
        out.push_back({{0.0, 0.0}, {-1.0, 0.0}, 0});
        out.push_back({{len, 0.0}, {1.0, 0.0}, 1});
        return out;
    }
    const double lx = dom.axis(0).length();
    const double ly = dom.axis(1).length();
    for (double y : dom.axis(1).nodes()) {
        out.push_back({{0.0, y}, {-1.0, 0.0}, 0});
        out.push_back({{lx, y}, {1.0, 0.0}, 1});
    }
    for (double x : dom.axis(0).nodes()) {
        out.push_back({{x, 0.0}, {0.0, -1.0}, 2});
        out.push_back({{x, ly}, {0.0, 1.0}, 3});
    }
    return out;
}

namespace {

double fd_step(const SpectralDomain& dom) {
    double len = dom.axis(0).length();
    if (dom.dim() == 2) len = std::min(len, dom.axis(1).length());
    return 5e-3 * len;
}

// Point evaluator of an initial field.
double field_at(const InitialField& u, const DomainPtr& dom, Point p) {
    if (u.field.is_analytic()) return u.field.eval(p);
    if (u.field.is_zero()) return 0.0;
    return u.field.discretize(dom).eval(p);
}

// j-th iterated Laplacian at a point; analytic chain preferred, finite
// differences of the deepest available level otherwise.
double field_lap_at(const InitialField& u, const DomainPtr& dom, Point p, int j);

double fd_laplacian(const std::function<double(Point)>& f, const SpectralDomain& dom, Point p,
                    double s) {
    auto d2 = [&](int axis) {
        const double len = dom.axis(axis).length();
        const double x = axis == 0 ? p.x : p.y;
        auto line = [&](double t) {
            Point q = p;
            (axis == 0 ? q.x : q.y) = t;
            return f(q);
        };
        // keep the stencil inside [0, len]
        if (x < 3.0 * s) return fd_deriv_onesided(line, x, s, 2, 7);
        if (x > len - 3.0 * s) {
            auto rev = [&](double t) { return line(x - (t - x)); };
            return fd_deriv_onesided(rev, x, s, 2, 7);
        }
        auto c = [&](double w) { return (line(x + w) - 2.0 * line(x) + line(x - w)) / (w * w); };
        return (4.0 * c(s) - c(2.0 * s)) / 3.0;
    };
    double lap = d2(0);
    if (dom.dim() == 2) lap += d2(1);
    return lap;
}

double field_lap_at(const InitialField& u, const DomainPtr& dom, Point p, int j) {
    if (j == 0) return field_at(u, dom, p);
    if (static_cast<int>(u.lap.size()) >= j && u.lap[j - 1]) return u.lap[j - 1](p);
    // finite-difference fallback from the deepest analytic level
    const int base = std::min<int>(j - 1, static_cast<int>(u.lap.size()));
    std::function<double(Point)> g;
    if (base == 0) {
        if (!u.field.is_analytic()) {
            if (u.field.is_zero()) return 0.0;
            GridFunction gf = u.field.discretize(dom);
            auto lap_coef = dom->laplacian(gf.coeffs());
            for (int r = 1; r < j; ++r) lap_coef = dom->laplacian(lap_coef);
            return dom->eval(lap_coef, p);
        }
        g = u.field.fn();
    } else {
        g = u.lap[base - 1];
    }
    const double s = fd_step(*dom);
    std::function<double(Point)> cur = g;
    for (int r = base; r < j; ++r) {
        auto prev = cur;
        cur = [prev, &dom, s](Point q) { return fd_laplacian(prev, *dom, q, s); };
    }
    return cur(p);
}

// Outward normal derivative of a point evaluator (one-sided, into the domain).
double normal_deriv(const std::function<double(Point)>& f, const BoundarySample& bs, double s) {
    auto line = [&](double t) {
        // t >= 0 walks inward
        return f({bs.p.x - t * bs.normal.x, bs.p.y - t * bs.normal.y});
    };
    return -fd_deriv_onesided(line, 0.0, s, 1, 6);
}

struct TraceCheck {
    std::string id;
    std::string description;
    std::function<double(const BoundarySample&)> field_side;
    std::function<double(int)> data_side; // per component
};

void run_trace_checks(CompatReport& rep, const SpectralDomain& dom,
                      const std::vector<TraceCheck>& checks, double tol) {
    auto samples = boundary_samples(dom);
    for (const auto& chk : checks) {
        double res = 0.0;
        for (const auto& bs : samples)
            res = std::max(res, std::abs(chk.field_side(bs) - chk.data_side(bs.component)));
        CompatCondition c;
        c.id = chk.id;
        c.description = chk.description;
        c.residual = res;
        c.threshold = tol;
        c.pass = res <= tol;
        rep.add(std::move(c));
    }
}

} // namespace

CompatReport dirichlet_compat(const ProblemData& data, const DomainPtr& dom, double tol) {
    if (dom->bc() != Bc::dirichlet)
        throw ConfigError("dirichlet_compat: domain has Neumann boundary conditions");
    CompatReport rep;
    const bool extended = data.p_exponent > Fraction(3, 2);

    std::vector<TraceCheck> checks;
    checks.push_back({"u0_trace", "u0|G = g(0)",
                      [&](const BoundarySample& b) { return field_at(data.u0, dom, b.p); },
                      [&](int c) { return data.g.comps[c].deriv0(0); }});
    checks.push_back({"u1_trace", "u1|G = g_t(0)",
                      [&](const BoundarySample& b) { return field_at(data.u1, dom, b.p); },
                      [&](int c) { return data.g.comps[c].deriv0(1); }});
    checks.push_back({"lap_u0_trace", "lap u0|G = h(0)",
                      [&](const BoundarySample& b) { return field_lap_at(data.u0, dom, b.p, 1); },
                      [&](int c) { return data.h.comps[c].deriv0(0); }});
    if (extended) {
        checks.push_back({"lap_u1_trace", "lap u1|G = h_t(0)  [p > 3/2]",
                          [&](const BoundarySample& b) { return field_lap_at(data.u1, dom, b.p, 1); },
                          [&](int c) { return data.h.comps[c].deriv0(1); }});
        checks.push_back({"u2_trace", "u2|G = g_tt(0)  [p > 3/2]",
                          [&](const BoundarySample& b) { return field_at(data.u2, dom, b.p); },
                          [&](int c) { return data.g.comps[c].deriv0(2); }});
    }
    run_trace_checks(rep, *dom, checks, tol);
    return rep;
}

CompatReport neumann_compat(const ProblemData& data, const DomainPtr& dom, double tol) {
    if (dom->bc() != Bc::neumann)
        throw ConfigError("neumann_compat: domain has Dirichlet boundary conditions");
    CompatReport rep;
    const bool extended = data.p_exponent > Fraction(3);
    const double s = fd_step(*dom);

    auto nder = [&](const InitialField& u, int lap_order) {
        return [&u, lap_order, dom, s](const BoundarySample& b) {
            auto f = [&u, &dom, lap_order](Point q) { return field_lap_at(u, dom, q, lap_order); };
            return normal_deriv(f, b, s);
        };
    };

    std::vector<TraceCheck> checks;
    checks.push_back({"u0_ntrace", "dnu u0|G = g(0)", nder(data.u0, 0),
                      [&](int c) { return data.g.comps[c].deriv0(0); }});
    checks.push_back({"lap_u0_ntrace", "dnu lap u0|G = h(0)", nder(data.u0, 1),
                      [&](int c) { return data.h.comps[c].deriv0(0); }});
    checks.push_back({"u1_ntrace", "dnu u1|G = g_t(0)", nder(data.u1, 0),
                      [&](int c) { return data.g.comps[c].deriv0(1); }});
    if (extended) {
        checks.push_back({"lap_u1_ntrace", "dnu lap u1|G = h_t(0)  [p > 3]", nder(data.u1, 1),
                          [&](int c) { return data.h.comps[c].deriv0(1); }});
        checks.push_back({"u2_ntrace", "dnu u2|G = g_tt(0)  [p > 3]", nder(data.u2, 0),
                          [&](int c) { return data.g.comps[c].deriv0(2); }});
    }
    run_trace_checks(rep, *dom, checks, tol);
    return rep;
}

std::vector<GridFunction> derived_initial(const SpaceTimeField& f, const InitialField& u0,
                                          double mu, int count, const DomainPtr& dom) {
    if (count < 1) throw ConfigError("derived_initial: count must be >= 1");
    std::vector<GridFunction> out;
    std::vector<double> prev = u0.field.is_zero() ? std::vector<double>(dom->total_modes(), 0.0)
                                                  : u0.field.discretize(dom).coeffs();
    for (int j = 1; j <= count; ++j) {
        auto uj = dom->laplacian(prev);
        if (mu != 0.0)
            for (int m = 0; m < dom->total_modes(); ++m) uj[m] -= mu * prev[m];
        if (!f.is_zero()) {
            auto fv = f.deriv0_values(dom, j - 1);
            auto fc = dom->forward(fv);
            for (int m = 0; m < dom->total_modes(); ++m) uj[m] += fc[m];
        }
        out.push_back(GridFunction::from_coeffs(dom, uj));
        prev = std::move(uj);
    }
    return out;
}

std::vector<std::vector<TimeSignal>> derived_boundary(
    const SpaceTimeField& f, const std::vector<std::function<double(double, Point)>>& f_lap,
    const BoundaryData& g, double mu, int count, const DomainPtr& dom) {
    if (count < 1) throw ConfigError("derived_boundary: count must be >= 1");
    auto samples = boundary_samples(*dom);
    const int ncomp = boundary_component_count(*dom);
    const bool neumann = dom->bc() == Bc::neumann;
    const double s = fd_step(*dom);

    // representative sample per component (edge data are constant per edge)
    std::vector<BoundarySample> rep(ncomp);
    for (const auto& bs : samples) rep[bs.component] = bs;

    // trace_B(lap^j f) as a time signal per component
    auto trace_of_lap = [&, samples](int j, int comp) -> std::function<double(double)> {
        const BoundarySample bs = rep[comp];
        std::function<double(double, Point)> fj;
        if (f.is_zero()) {
            // nothing to trace
        } else if (j == 0) {
            const auto& ff = f;
            fj = [&ff](double t, Point p) { return ff.eval(t, p); };
        } else {
            if (static_cast<int>(f_lap.size()) < j)
                throw ConfigError("derived_boundary: need lap^" + std::to_string(j) +
                                  " of f (provide f_lap)");
            fj = f_lap[j - 1];
        }
        if (!fj) return [](double) { return 0.0; };
        if (!neumann)
            return [fj, bs](double t) { return fj(t, bs.p); };
        return [fj, bs, s](double t) {
            auto slice = [&](Point q) { return fj(t, q); };
            return normal_deriv(slice, bs, s);
        };
    };

    std::vector<std::vector<TimeSignal>> out;
    std::vector<TimeSignal> cur = g.comps;
    for (int j = 0; j < count; ++j) {
        std::vector<TimeSignal> next(ncomp);
        for (int c = 0; c < ncomp; ++c) {
            TimeSignal gj = cur[c];
            auto tr = trace_of_lap(j, c);
            next[c] = TimeSignal([gj, mu, tr](double t) {
                return signal_derivative(gj, t, 1) + mu * gj(t) - tr(t);
            });
        }
        out.push_back(next);
        cur = std::move(next);
    }
    return out;
}

CompatReport heat_higher_compat(const SpaceTimeField& f,
                                const std::vector<std::function<double(double, Point)>>& f_lap,
                                const BoundaryData& g, const InitialField& u0, double mu, int l,
                                int k, const Fraction& p, const DomainPtr& dom, double tol) {
    if (l < 0 || k < 1) throw ConfigError("heat_higher_compat: need l >= 0, k >= 1");
    const int jb = dom->bc() == Bc::dirichlet ? 0 : 1;
    const Fraction crit = Fraction(jb, 2) + Fraction(3) / (Fraction(2) * p);
    if (crit == Fraction(1))
        throw ConfigError("heat_higher_compat: p with j_B/2 + 3/(2p) = 1 is excluded");
    const Fraction jbound = Fraction(l + k) - crit;

    CompatReport rep;
    const int last = l + k - 1;

    // Norm-membership conditions on the derived u_j: informational.
    for (int j = 1; j <= last; ++j) {
        CompatCondition c;
        c.id = "u" + std::to_string(j) + "_membership";
        c.description = "u_" + std::to_string(j) + " in " +
                        (j <= l - 1 ? "W^{2k}_p" : "W^{2(l+k-j)-2/p}_p") +
                        " (norm membership; not checked numerically)";
        c.informational = true;
        rep.add(std::move(c));
    }

    // Point evaluator of u_j via the binomial expansion of the recursion.
    const bool neumann = dom->bc() == Bc::neumann;
    const double s = fd_step(*dom);
    auto u_j_at = [&](int j, Point q) {
        // (lap - mu)^j u0
        double acc = 0.0;
        double binom = 1.0;
        for (int r = j; r >= 0; --r) {
            const double coef = binom * std::pow(-mu, j - r);
            if (coef != 0.0) acc += coef * field_lap_at(u0, dom, q, r);
            binom = binom * r / (j - r + 1.0);
        }
        // sum_{i<j} (lap - mu)^{j-1-i} d_t^i f(0)
        for (int i = 0; i < j && !f.is_zero(); ++i) {
            const int q_ord = j - 1 - i;
            double b2 = 1.0;
            for (int r = q_ord; r >= 0; --r) {
                const double coef = b2 * std::pow(-mu, q_ord - r);
                if (coef != 0.0) {
                    std::function<double(double, Point)> fr;
                    if (r == 0) {
                        if (!f.is_zero()) {
                            const auto& ff = f;
                            fr = [&ff](double t, Point pt) { return ff.eval(t, pt); };
                        }
                    } else if (static_cast<int>(f_lap.size()) >= r) {
                        fr = f_lap[r - 1];
                    } else {
                        throw ConfigError("heat_higher_compat: provide lap^" + std::to_string(r) +
                                          " of f");
                    }
                    if (fr) {
                        auto slice = [&fr, q](double t) { return fr(t, q); };
                        double v;
                        if (i == 0) v = slice(0.0);
                        else if (i == 1) v = fd_deriv1_right(slice, 0.0, 1e-2);
                        else if (i == 2) v = fd_deriv2_right(slice, 0.0, 2e-2);
                        else if (i == 3) v = fd_deriv3_right(slice, 0.0, 3e-2);
                        else throw ConfigError("heat_higher_compat: time depth > 3 unsupported");
                        acc += coef * v;
                    }
                }
                b2 = b2 * r / (q_ord - r + 1.0);
            }
        }
        return acc;
    };

    auto samples = boundary_samples(*dom);
    for (int j = 0; j <= last; ++j) {
        if (Fraction(j) > jbound) break;
        double res = 0.0;
        for (const auto& bs : samples) {
            double lhs = g.comps[bs.component].deriv0(j);
            double rhs;
            if (!neumann) {
                rhs = j == 0 ? field_at(u0, dom, bs.p) : u_j_at(j, bs.p);
            } else {
                auto fj = [&](Point q) { return j == 0 ? field_at(u0, dom, q) : u_j_at(j, q); };
                rhs = normal_deriv(fj, bs, s);
            }
            res = std::max(res, std::abs(lhs - rhs));
        }
        CompatCondition c;
        c.id = "trace_j" + std::to_string(j);
        c.description = "d_t^" + std::to_string(j) + " g(0) = trace_B u_" + std::to_string(j);
        c.residual = res;
        c.threshold = tol;
        c.pass = res <= tol;
        rep.add(std::move(c));
    }
    return rep;
}

CompatReport neumann_mean_compat(const SpaceTimeField& f, const BoundaryData& g,
                                 const SpaceField& u0, const DomainPtr& dom,
                                 const TimeGrid& sample_grid, double tol) {
    if (dom->bc() != Bc::neumann)
        throw ConfigError("neumann_mean_compat: Neumann domain required");
    CompatReport rep;

    {
        CompatCondition c;
        c.id = "u0_mean";
        c.description = "integral of u0 over Omega vanishes";
        const double m = u0.is_zero() ? 0.0 : u0.discretize(dom).mean();
        c.residual = std::abs(m) * dom->measure();
        c.threshold = tol;
        c.pass = c.residual <= tol;
        rep.add(std::move(c));
    }
    {
        CompatCondition c;
        c.id = "flux_balance";
        c.description = "integral of f plus boundary integral of g vanishes for all t";
        double res = 0.0;
        const int ncomp = boundary_component_count(*dom);
        std::vector<double> gv(ncomp);
        for (int i = 0; i < sample_grid.size(); ++i) {
            const double t = sample_grid.time(i);
            double fi = 0.0;
            if (!f.is_zero()) fi = dom->mean_values(f.sample(dom, t)) * dom->measure();
            for (int cc = 0; cc < ncomp; ++cc) gv[cc] = g.comps[cc](t);
            res = std::max(res, std::abs(fi + boundary_integral(*dom, gv)));
        }
        c.residual = res;
        c.threshold = tol;
        c.pass = res <= tol;
        rep.add(std::move(c));
    }
    return rep;
}

} // namespace bcx
