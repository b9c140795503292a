#pragma once

#include "bcx/block_operator.hpp"
#include "bcx/lifting.hpp"
#include "bcx/problem.hpp"

#include <array>

namespace bcx {

struct SolveOptions {
    int state_stride = 0;      // store full states every k-th step (0 = never)
    bool cubic_forcing = true; // Hermite forcing reconstruction; false = piecewise linear
    bool fine_forcing = true;  // project analytic data through the oversampled grid
    bool check_compat = true;  // gate solve_bc_linear on the compatibility validator
    double compat_tol = 1e-6;
    bool allow_neumann_drift = false; // permit mu = 0 Neumann heat with nonzero-mean data
};

// Heat equation u_t + mu u - a lap u = f with boundary datum g (Dirichlet or
// Neumann trace) and initial value u0.  Mode-wise exponential time
// differencing: exact homogeneous propagator plus Duhamel quadrature of the
// polynomially reconstructed forcing.
Trajectory solve_heat(const SpaceTimeField& f, const BoundaryData& g, const SpaceField& u0,
                      const DomainPtr& dom, const TimeGrid& grid, double a, double mu = 0.0,
                      const SolveOptions& opt = {});

// Linearized Westervelt equation u_tt - b lap u_t - c^2 lap u = f.
Trajectory solve_westervelt_linear(const SpaceTimeField& f, const BoundaryData& g_bc,
                                   const SpaceField& u0, const SpaceField& u1,
                                   const DomainPtr& dom, const TimeGrid& grid, const PdeParams& p,
                                   const SolveOptions& opt = {});

// Composed linear Blackstock-Crighton solve: Westervelt stage for
// w = a lap u - u_t with boundary value a h - g_t and initial data
// (a lap u0 - u1, a lap u1 - u2), then a heat stage u_t - a lap u = -w.
// Modal series plus liftings are retained so downstream consumers can
// evaluate fields without reprojecting the polynomial liftings.
struct LinearSolution {
    TimeGrid grid;
    DomainPtr domain;
    PdeParams params;

    // Homogenized modal series, one row per time node.
    std::vector<std::vector<double>> u_h;  // heat-stage unknown minus lift_g
    std::vector<std::vector<double>> w_h;  // stage-1 unknown minus lift_psi
    std::vector<std::vector<double>> wt_h; // its time derivative

    Lifting lift_g, lift_psi;
    // Per derivative order 0..2: per component: series over nodes.
    std::array<std::vector<std::vector<double>>, 3> g_series, psi_series;

    std::vector<double> modal_u(int i) const;
    std::vector<double> modal_ut(int i) const;
    std::vector<double> modal_utt(int i) const;
    double mean_u(int i) const; // exact (modal mean + analytic lifting mean)

    std::vector<double> fine_u(int i) const;
    std::vector<double> fine_ut(int i) const;
    std::vector<std::vector<double>> fine_grad_u(int i) const;

    Trajectory to_trajectory(int state_stride) const;
};

LinearSolution solve_bc_linear_full(const ProblemData& data, const DomainPtr& dom,
                                    const TimeGrid& grid, const PdeParams& p,
                                    const SolveOptions& opt = {});

Trajectory solve_bc_linear(const ProblemData& data, const DomainPtr& dom, const TimeGrid& grid,
                           const PdeParams& p, const SolveOptions& opt = {});

// Direct per-mode 3x3 propagation of (u, u_t, u_tt - b lap u_t - c^2 lap u).
// Homogeneous boundary data only; serves as the factorization cross-check.
Trajectory solve_direct_modal(const ProblemData& data, const DomainPtr& dom, const TimeGrid& grid,
                              const PdeParams& p, const SolveOptions& opt = {});

// Mean-value ODEs of the Neumann problems (means over Omega resp. Gamma):
//   order 1:  m' = f_bar + a |Gamma||Omega|^-1 g_bar
//   order 2:  m'' = f_bar + b |Gamma||Omega|^-1 g_bar'
//   order 3:  coupled system of the composed factorization
//             (phi'' = f_bar + gam (b psi' + c^2 psi), psi = a h_bar - g_bar',
//              m' = a gam g_bar - phi).
struct MeanOdeData {
    TimeGrid grid;
    std::vector<double> f_bar;   // |Omega|^-1 integral of f
    std::vector<double> g_bar;   // |Gamma|^-1 boundary mean of g
    std::vector<double> h_bar;   // order 3 only
    std::vector<double> g_bar_t; // optional; assembled by grid differences if empty
    double u0_mean = 0.0, u1_mean = 0.0, u2_mean = 0.0;
    PdeParams params;
    double gamma_ratio = 0.0; // |Gamma| / |Omega|
};

MeanTrajectory neumann_mean_ode(const MeanOdeData& d, int order);

// Convenience: assemble MeanOdeData from problem data on a domain.
MeanOdeData make_mean_ode_data(const ProblemData& data, const DomainPtr& dom,
                               const TimeGrid& grid, const PdeParams& p);

} // namespace bcx
