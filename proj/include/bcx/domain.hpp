#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace bcx {

enum class Bc { dirichlet, neumann };

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Per-axis mode numbers: sine basis uses 1-based mode numbers, cosine basis
// 0-based (mode 0 is the constant).  For intervals iy stays 0.
struct ModeIndex {
    int ix = 0;
    int iy = 0;
};

class SpectralDomain;
using DomainPtr = std::shared_ptr<const SpectralDomain>;

// One spatial axis of a tensor-product domain: sin(m pi x / L) for Dirichlet,
// cos(m pi x / L) for Neumann.  Collocation follows the discrete sine /
// cosine transform conventions (uniform interior grid for sine, uniform
// closed grid with half-weighted endpoints for cosine), so the retained
// basis is exactly orthogonal discretely and transform round trips are exact
// to roundoff.  A 3/2-oversampled companion grid serves dealiased products.
class AxisBasis {
public:
    AxisBasis(Bc bc, double length, int n_modes);

    Bc bc() const { return bc_; }
    double length() const { return length_; }
    int n_modes() const { return n_modes_; }
    int grid_size() const { return static_cast<int>(nodes_.size()); }
    int fine_grid_size() const { return static_cast<int>(fine_nodes_.size()); }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& fine_nodes() const { return fine_nodes_; }
    const std::vector<double>& quad_weights() const { return weights_; }

    int mode_number(int k) const { return bc_ == Bc::dirichlet ? k + 1 : k; }
    double eigenvalue(int k) const; // Laplacian eigenvalue of basis function k

    double basis_l2sq(int k) const;     // integral of phi_k^2 over (0, L)
    double basis_integral(int k) const; // integral of phi_k over (0, L)

    // Dense transform applications; all sizes must match exactly.
    void forward(std::span<const double> values, std::span<double> coeffs) const;
    void inverse(std::span<const double> coeffs, std::span<double> values) const;
    void inverse_fine(std::span<const double> coeffs, std::span<double> fine_values) const;
    void forward_fine(std::span<const double> fine_values, std::span<double> coeffs) const;
    void deriv_fine(std::span<const double> coeffs, std::span<double> fine_values) const;

    double eval(std::span<const double> coeffs, double x) const;
    double eval_deriv(std::span<const double> coeffs, double x) const;

private:
    double phi(int k, double x) const;
    double dphi(int k, double x) const;

    Bc bc_;
    double length_;
    int n_modes_;
    std::vector<double> nodes_, fine_nodes_, weights_;
    // Row-major [grid][mode] value tables and transform weights.
    std::vector<double> phi_, fine_phi_, dphi_fine_;
    std::vector<double> fwd_, fwd_fine_; // [mode][grid]
};

// Interval (0, L) or rectangle (0, Lx) x (0, Ly) with analytic Laplacian
// eigenpairs.  Immutable after construction; safe to share across threads.
class SpectralDomain : public std::enable_shared_from_this<SpectralDomain> {
public:
    static DomainPtr interval(Bc bc, double length, int n_modes);
    static DomainPtr rectangle(Bc bc, double lx, double ly, int nx_modes, int ny_modes);

    int dim() const { return axes_.size() == 1 ? 1 : 2; }
    Bc bc() const { return axes_[0].bc(); }
    const AxisBasis& axis(int d) const { return axes_[d]; }

    int total_modes() const;
    int grid_size() const;
    int fine_grid_size() const;

    double measure() const;          // |Omega|
    double boundary_measure() const; // |Gamma|; interval boundary counts points

    // Flat mode index <-> per-axis mode positions (storage order: x fastest).
    int flat_index(int kx, int ky) const;
    ModeIndex mode_index(int flat) const;
    double eigenvalue_flat(int flat) const;
    double basis_l2sq_flat(int flat) const;

    // Eigenpairs sorted ascending by eigenvalue (ties by mode index).
    // Dirichlet lists exclude 0; a Neumann list contains 0 exactly once.
    std::vector<std::pair<double, ModeIndex>> eigenpairs() const;

    std::vector<double> forward(std::span<const double> values) const;
    std::vector<double> inverse(std::span<const double> coeffs) const;
    std::vector<double> inverse_fine(std::span<const double> coeffs) const;
    std::vector<double> forward_fine(std::span<const double> fine_values) const;

    // Laplacian in spectral space: mode scaled by -lambda.
    std::vector<double> laplacian(std::span<const double> coeffs) const;

    // Gradient components evaluated on the fine grid.
    std::vector<std::vector<double>> gradient_fine(std::span<const double> coeffs) const;

    double eval(std::span<const double> coeffs, Point p) const;

    double mean(std::span<const double> coeffs) const;
    double mean_values(std::span<const double> values) const;
    // L2 norm of the expansion (exact via discrete orthogonality).
    double l2_norm(std::span<const double> coeffs) const;

    const std::vector<Point>& grid_points() const { return grid_points_; }
    const std::vector<Point>& fine_grid_points() const { return fine_grid_points_; }
    const std::vector<double>& grid_quad_weights() const { return grid_weights_; }

private:
    explicit SpectralDomain(std::vector<AxisBasis> axes);

    std::vector<AxisBasis> axes_;
    std::vector<Point> grid_points_, fine_grid_points_;
    std::vector<double> grid_weights_;
};

// Discrete field tagged with its owning domain.  Holds collocation values,
// spectral coefficients, or both; missing representation is derived on
// demand through the domain transforms.  A dealiased product carries both:
// exact node values and the 3/2-rule Galerkin coefficients of the same
// function (the product is generally not band-limited, so the two are not
// connected by the coarse-grid transform).
class GridFunction {
public:
    GridFunction() = default;

    static GridFunction from_values(DomainPtr dom, std::vector<double> values);
    static GridFunction from_coeffs(DomainPtr dom, std::vector<double> coeffs);
    static GridFunction from_both(DomainPtr dom, std::vector<double> values,
                                  std::vector<double> coeffs);
    static GridFunction zero(DomainPtr dom);

    bool empty() const { return !dom_; }
    const DomainPtr& domain() const { return dom_; }

    const std::vector<double>& coeffs() const;
    const std::vector<double>& values() const;
    bool has_coeffs() const { return coeffs_.has_value(); }
    bool has_values() const { return values_.has_value(); }

    double mean() const;
    double l2_norm() const;
    double eval(Point p) const;

private:
    DomainPtr dom_;
    mutable std::optional<std::vector<double>> coeffs_;
    mutable std::optional<std::vector<double>> values_;
};

GridFunction transform(const GridFunction& f);         // ensure spectral form
GridFunction inverse_transform(const GridFunction& f); // ensure value form

// Mean-zero projection u -> u - <u>_Omega.  Neumann domains only; the
// projection zeroes the constant mode exactly.
GridFunction project_mean_zero(const GridFunction& f);

// Pointwise product evaluated with 3/2-rule oversampling and truncated to
// the retained modes.  The result carries both representations (see
// GridFunction).
GridFunction dealiased_product(const GridFunction& f, const GridFunction& g);

} // namespace bcx
