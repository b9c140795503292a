#pragma once

#include "bcx/domain.hpp"
#include "bcx/fraction.hpp"
#include "bcx/signals.hpp"

#include <string>
#include <vector>

namespace bcx {

// Boundary datum per boundary component.  Interval components are the two
// endpoints {x=0, x=L}; rectangle components are the four edges
// {west, east, south, north} with edge-constant values.
struct BoundaryData {
    std::vector<TimeSignal> comps;

    static BoundaryData zero(const SpectralDomain& dom);
    static BoundaryData interval(TimeSignal left, TimeSignal right);
    bool all_zero_constant() const;
};

int boundary_component_count(const SpectralDomain& dom);
// |Gamma|-weighted mean of per-component values.
double boundary_mean(const SpectralDomain& dom, std::span<const double> comp_values);
// Non-normalized boundary integral of per-component values.
double boundary_integral(const SpectralDomain& dom, std::span<const double> comp_values);

// Data tuple (f, g, h, u0, u1, u2) of the linear and nonlinear problems.
// Initial fields may carry analytic iterated Laplacians (lap[0] = Delta u,
// lap[1] = Delta^2 u, ...) used by the compatibility validators; absent
// entries fall back to finite differences of the base callable.
struct InitialField {
    SpaceField field;
    std::vector<std::function<double(Point)>> lap;
};

struct ProblemData {
    SpaceTimeField f;
    std::vector<std::function<double(double, Point)>> f_lap; // iterated Laplacians of f
    BoundaryData g;
    BoundaryData h;
    InitialField u0, u1, u2;
    Fraction p_exponent{2};
};

// Norm channels recorded along a trajectory.  Sobolev channels use the
// spectral weights of decay.hpp; mean_u is exact (constant-mode /
// basis-integral bookkeeping, including analytic lifting means).
struct NormSeries {
    std::vector<double> t;
    std::vector<double> l2_u, l2_ut, l2_utt, h2_u, h4_u, mean_u;
    std::vector<double> guard_min; // nonlinear runs only

    const std::vector<double>& channel(const std::string& name) const;
};

struct FieldState {
    double time = 0.0;
    GridFunction u, ut, utt;
};

struct Trajectory {
    TimeGrid grid;
    DomainPtr domain;
    NormSeries norms;
    std::vector<FieldState> states; // stride-sampled; empty if stride == 0
};

// Spatially constant component of a Neumann solution (mean split u = v + w).
struct MeanTrajectory {
    std::vector<double> t;
    std::vector<double> w, w_t, w_tt;
};

} // namespace bcx
