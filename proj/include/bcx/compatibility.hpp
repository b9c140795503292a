#pragma once

#include "bcx/problem.hpp"

#include <string>

namespace bcx {

struct CompatCondition {
    std::string id;
    std::string description;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = true;
    bool informational = false; // norm-membership entries: recorded, not checked
};

struct CompatReport {
    std::vector<CompatCondition> conditions;
    bool pass = true;

    void add(CompatCondition c);
    std::string first_failure() const;
    const CompatCondition& find(const std::string& id) const;
    bool has(const std::string& id) const;
};

// Boundary sample points with outward normals, grouped by component.
struct BoundarySample {
    Point p;
    Point normal;
    int component = 0;
};
std::vector<BoundarySample> boundary_samples(const SpectralDomain& dom);

// Pointwise compatibility between initial and boundary data.
//   Dirichlet: u0|G = g(0), u1|G = g_t(0), lap u0|G = h(0), and for p > 3/2
//              also lap u1|G = h_t(0), u2|G = g_tt(0).
//   Neumann:   normal-trace analogues with the switch at p > 3.
CompatReport dirichlet_compat(const ProblemData& data, const DomainPtr& dom, double tol);
CompatReport neumann_compat(const ProblemData& data, const DomainPtr& dom, double tol);

// Derived initial fields u_j = d_t^{j-1} f|_0 + (lap - mu) u_{j-1} (spectral
// recursion), j = 1..count.
std::vector<GridFunction> derived_initial(const SpaceTimeField& f, const InitialField& u0,
                                          double mu, int count, const DomainPtr& dom);

// Derived boundary signals g_{j+1} = (d_t + mu) g_j - trace_B(lap^j f),
// j = 0..count-1; one signal per boundary component per level.
std::vector<std::vector<TimeSignal>> derived_boundary(const SpaceTimeField& f,
                                                      const std::vector<std::function<double(double, Point)>>& f_lap,
                                                      const BoundaryData& g, double mu, int count,
                                                      const DomainPtr& dom);

// Full compatibility ladder of the heat problem (d_t + mu - lap) u = f,
// trace_B u = g, u(0) = u0 in W_p^{l+k}(J; Lp) cap W_p^l(J; W^{2k}):
// checks d_t^j g = trace_B u_j for integer j <= l + k - j_B/2 - 3/(2p)
// (exact rational bound), and records the u_j norm-membership conditions as
// informational entries.  Rejects p with j_B/2 + 3/(2p) = 1.
CompatReport heat_higher_compat(const SpaceTimeField& f,
                                const std::vector<std::function<double(double, Point)>>& f_lap,
                                const BoundaryData& g, const InitialField& u0, double mu, int l,
                                int k, const Fraction& p, const DomainPtr& dom, double tol);

// Zero-mean constraints of the Neumann heat problem: integral of u0
// vanishes and, for every time sample, integral of f plus the boundary
// integral of g vanishes.
CompatReport neumann_mean_compat(const SpaceTimeField& f, const BoundaryData& g,
                                 const SpaceField& u0, const DomainPtr& dom,
                                 const TimeGrid& sample_grid, double tol);

} // namespace bcx
