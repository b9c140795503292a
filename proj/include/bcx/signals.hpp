#pragma once

#include "bcx/domain.hpp"

#include <functional>
#include <vector>

namespace bcx {

// Uniform time grid t_i = t0 + i dt, i = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int n_steps = 0;

    int size() const { return n_steps + 1; }
    double time(int i) const { return t0 + dt * i; }
    double horizon() const { return t0 + dt * n_steps; }
    std::vector<double> times() const;
};

// Scalar function of time: either analytic (callable) or sampled on a grid.
// Sampled signals interpolate linearly; derivatives at the left endpoint use
// one-sided second-order differences on the sample grid (so their accuracy
// scales with dt^2), while callable signals use one-sided fourth-order
// stencils with a Richardson step.
class TimeSignal {
public:
    TimeSignal() : TimeSignal(0.0) {}
    TimeSignal(double constant);                          // implicit: constant signal
    explicit TimeSignal(std::function<double(double)> fn);
    static TimeSignal sampled(TimeGrid grid, std::vector<double> values);

    double operator()(double t) const;
    bool is_sampled() const { return sampled_; }
    bool is_const_zero() const { return const_zero_; }

    // j-th derivative at t = 0+, j in {0, 1, 2}.
    double deriv0(int j) const;
    // First derivative at arbitrary t >= 0 (one-sided near 0 for callables).
    double deriv(double t) const;

    std::vector<double> sample(const TimeGrid& grid) const;

private:
    std::function<double(double)> fn_;
    bool sampled_ = false;
    bool const_zero_ = false;
    TimeGrid grid_;
    std::vector<double> values_;
};

// Scalar field on the domain: analytic, or frozen as a GridFunction.
class SpaceField {
public:
    SpaceField() = default;
    SpaceField(std::function<double(Point)> fn) : fn_(std::move(fn)) {}
    SpaceField(GridFunction g) : grid_(std::move(g)) {}
    static SpaceField zero();

    bool is_analytic() const { return static_cast<bool>(fn_); }
    bool is_zero() const { return !fn_ && grid_.empty(); }

    double eval(Point p) const; // analytic fields only
    GridFunction discretize(const DomainPtr& dom) const;

    const std::function<double(Point)>& fn() const { return fn_; }

private:
    std::function<double(Point)> fn_;
    GridFunction grid_;
};

// Space-time forcing.
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    SpaceTimeField(std::function<double(double, Point)> fn) : fn_(std::move(fn)) {}
    bool is_zero() const { return !fn_; }
    double eval(double t, Point p) const { return fn_ ? fn_(t, p) : 0.0; }

    // Values at time t on the coarse grid.
    std::vector<double> sample(const DomainPtr& dom, double t) const;
    // j-th time derivative at t = 0+ as a field sampled on the grid.
    std::vector<double> deriv0_values(const DomainPtr& dom, int j) const;

private:
    std::function<double(double, Point)> fn_;
};

// One-sided finite-difference derivatives of a callable at the left edge of
// its domain of definition (evaluations only at t >= t0).
double fd_deriv1_right(const std::function<double(double)>& f, double t0, double h);
double fd_deriv2_right(const std::function<double(double)>& f, double t0, double h);
double fd_deriv3_right(const std::function<double(double)>& f, double t0, double h);

// Derivative of a signal at t >= 0, orders 1..3.  Callable signals use
// centered high-order stencils (one-sided near 0); sampled signals fall back
// to grid differences.
double signal_derivative(const TimeSignal& s, double t, int order);

// Derivative series on a grid (order 0 = plain sampling).
std::vector<double> signal_deriv_series(const TimeSignal& s, const TimeGrid& grid, int order);

// Fourth-order first-derivative of a sampled series on its uniform grid
// (second-order when fewer than five samples).
std::vector<double> series_derivative(const TimeGrid& grid, std::span<const double> f);

// Cumulative integral of samples on a uniform grid.  Trapezoid with Gregory
// endpoint corrections: fourth order for smooth integrands, exact zero for
// identically zero input.
std::vector<double> cumulative_integral(const TimeGrid& grid, std::span<const double> f);

} // namespace bcx
