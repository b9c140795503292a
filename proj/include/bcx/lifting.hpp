#pragma once

#include "bcx/problem.hpp"

#include <vector>

namespace bcx {

// Polynomial boundary lifting ell(t, x) = sum_c sig_c(t) shape_c(x).
//
// Interval shapes: Dirichlet uses the degree-1 interpolants of the endpoint
// values; Neumann uses the unique zero-mean quadratics with unit slope at
// one endpoint and zero at the other.  Rectangles: Neumann lifts per-edge
// constants by tensoring the 1-D shapes; Dirichlet edge constants must agree
// at corners (which for edge-constant data means a single common value).
//
// Shapes are low-degree polynomials, so Delta(shape) is constant and
// Delta^2(shape) = 0; the constant projects exactly onto a Neumann basis
// (mode 0) and vanishes for the Dirichlet shapes.
class Lifting {
public:
    Lifting() = default; // zero lifting

    static Lifting make(const DomainPtr& dom, const BoundaryData& data);

    bool is_zero() const { return comps_.empty(); }
    const DomainPtr& domain() const { return dom_; }

    // Signal values / derivative series on a time grid, one row per component.
    // Derivative series use per-node stencils of the signal machinery.
    std::vector<std::vector<double>> signal_series(const TimeGrid& grid, int deriv_order) const;

    double eval(double t, Point p) const;
    double eval_component_shape(int c, Point p) const;

    // Assemble sum_c w_c * (per-component data) for given component weights.
    std::vector<double> combine_coeffs(std::span<const double> w) const;     // basis projection
    std::vector<double> combine_values(std::span<const double> w) const;     // coarse grid
    std::vector<double> combine_fine(std::span<const double> w) const;       // fine grid
    std::vector<double> combine_grad_fine(int axis, std::span<const double> w) const;
    std::vector<double> combine_lap_coeffs(std::span<const double> w) const; // proj. of Delta ell
    double combine_mean(std::span<const double> w) const;                    // exact mean

    int n_components() const { return static_cast<int>(comps_.size()); }
    const TimeSignal& signal(int c) const { return comps_[c].sig; }

private:
    struct Comp {
        TimeSignal sig;
        std::function<double(Point)> shape;
        std::vector<double> shape_coeffs; // Galerkin projection (fine-grid quadrature)
        std::vector<double> shape_vals;
        std::vector<double> shape_fine;
        std::vector<std::vector<double>> grad_fine; // per axis, analytic shape gradients
        std::vector<double> lap_coeffs; // exact projection of the constant Delta shape
        double mean = 0.0;
    };

    DomainPtr dom_;
    std::vector<Comp> comps_;
};

} // namespace bcx
