#pragma once

#include "bcx/block_operator.hpp"
#include "bcx/linear_solvers.hpp"
#include "bcx/problem.hpp"

namespace bcx {

struct PicardConfig {
    int max_iters = 25;
    double tol = 1e-10;
};

struct SimConfig {
    PdeParams params;
    DomainPtr domain;
    double horizon = 30.0;
    double dt = 1e-3;
    double eps_guard = 0.5;      // enforce 1 + 2 k u_t >= eps_guard pointwise
    bool integrating_factor = true; // exact linear core (Lawson RK4); false: plain RK4
    bool check_compat = true;
    int state_stride = 0;
    PicardConfig picard;

    TimeGrid time_grid() const;
    void validate() const;
};

struct NonlinearState {
    std::vector<double> u, ut, utt; // spectral coefficients
};

// Quasilinear right-hand side u_ttt = (L u - N) / (1 + 2 k u_t) with
//   L u = (a+b) lap u_tt + c^2 lap u_t - a b lap^2 u_t - a c^2 lap^2 u,
//   N  = 2 k u_tt^2 + 2 s |grad u_t|^2 + 2 s grad u . grad u_tt,
// evaluated pseudospectrally (dealiased products, pointwise division on the
// fine grid) and arranged so the linear part stays exact in spectral space.
// Throws NumericalError with the offending location when the guard fails.
GridFunction rhs_expanded(const FieldState& state, const PdeParams& p, double eps_guard = 0.5);

// Time stepper; construct once, then advance states.
class NonlinearStepper {
public:
    NonlinearStepper(const SimConfig& cfg);

    NonlinearState step(const NonlinearState& s) const;
    double last_guard_min() const { return guard_min_; }

private:
    friend Trajectory simulate(const SimConfig&, const ProblemData&);
    std::vector<double> nonlinear_correction(const NonlinearState& s) const; // -n per mode
    void add_linear(const NonlinearState& s, std::vector<double>& out) const;

    SimConfig cfg_;
    std::vector<Mat> e_full_, e_half_; // per-mode companion exponentials
    mutable double guard_min_ = 1.0;
};

// Direct quasilinear simulation.  Boundary data must be homogeneous (the
// trace datum for lap u cannot be imposed on the truncated basis); use
// picard_solve for inhomogeneous problems.
Trajectory simulate(const SimConfig& cfg, const ProblemData& data);

// Fixed-point iteration mirroring the linearize-at-zero construction:
// u_star solves the linear problem with the given data and f = 0; the
// correction iterates u_bullet^{m+1} = L^{-1} N_tt(u_star + u_bullet^m) with
// homogeneous data.  N_tt is formed by fourth-order time differences of the
// nonlinearity along the iterate.
Trajectory picard_solve(const SimConfig& cfg, const ProblemData& data);

} // namespace bcx
