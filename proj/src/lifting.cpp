#include "bcx/lifting.hpp"

#include "bcx/errors.hpp"

#include <cmath>

namespace bcx {

namespace {

constexpr double kPi = 3.141592653589793;

struct Shape1d {
    std::function<double(double)> val;
    std::function<double(double)> der;
    std::vector<double> coeffs; // exact basis coefficients along the axis
};

// Exact projections: the shapes are polynomials, so quadrature-based
// transforms would alias; analytic coefficients keep the liftings clean in
// every mode (in particular the mean).
Shape1d dirichlet_shape(const AxisBasis& ax, bool right) {
    const double len = ax.length();
    Shape1d s;
    s.coeffs.resize(ax.n_modes());
    if (right) {
        s.val = [len](double x) { return x / len; };
        s.der = [len](double) { return 1.0 / len; };
        // <x/L, sin(m pi x/L)> = L (-1)^{m+1} / (m pi)
        for (int k = 0; k < ax.n_modes(); ++k) {
            const int m = k + 1;
            s.coeffs[k] = 2.0 * (m % 2 == 0 ? -1.0 : 1.0) / (m * kPi);
        }
    } else {
        s.val = [len](double x) { return 1.0 - x / len; };
        s.der = [len](double) { return -1.0 / len; };
        // <1 - x/L, sin(m pi x/L)> = L / (m pi)
        for (int k = 0; k < ax.n_modes(); ++k) s.coeffs[k] = 2.0 / ((k + 1) * kPi);
    }
    return s;
}

// Zero-mean quadratic with prescribed endpoint slopes: outward-normal
// derivative 1 on the chosen endpoint, 0 on the other.
Shape1d neumann_shape(const AxisBasis& ax, bool right) {
    const double len = ax.length();
    Shape1d s;
    s.coeffs.assign(ax.n_modes(), 0.0);
    if (right) {
        // s(x) = x^2/(2L) - L/6:  c_m = 2 L (-1)^m / (m pi)^2, c_0 = 0
        s.val = [len](double x) { return x * x / (2.0 * len) - len / 6.0; };
        s.der = [len](double x) { return x / len; };
        for (int k = 1; k < ax.n_modes(); ++k)
            s.coeffs[k] = 2.0 * len * (k % 2 == 0 ? 1.0 : -1.0) / (k * k * kPi * kPi);
    } else {
        // s(x) = x^2/(2L) - x + L/3:  c_m = 2 L / (m pi)^2, c_0 = 0
        s.val = [len](double x) { return x * x / (2.0 * len) - x + len / 3.0; };
        s.der = [len](double x) { return x / len - 1.0; };
        for (int k = 1; k < ax.n_modes(); ++k)
            s.coeffs[k] = 2.0 * len / (k * k * kPi * kPi);
    }
    return s;
}

// Coefficients of the constant 1 along one axis.
std::vector<double> axis_one_coeffs(const AxisBasis& ax) {
    std::vector<double> c(ax.n_modes(), 0.0);
    if (ax.bc() == Bc::neumann) {
        c[0] = 1.0;
    } else {
        for (int k = 0; k < ax.n_modes(); ++k) {
            const int m = k + 1;
            c[k] = 2.0 * (1.0 - (m % 2 == 0 ? 1.0 : -1.0)) / (m * kPi);
        }
    }
    return c;
}

double neumann_shape_lap(double len) { return 1.0 / len; }

} // namespace

Lifting Lifting::make(const DomainPtr& dom, const BoundaryData& data) {
    if (static_cast<int>(data.comps.size()) != boundary_component_count(*dom))
        throw ConfigError("Lifting: wrong number of boundary components");
    Lifting out;
    if (data.all_zero_constant()) return out;
    out.dom_ = dom;

    const Bc bc = dom->bc();
    struct Part {
        TimeSignal sig;
        std::function<double(Point)> shape;
        std::function<double(Point)> dx;
        std::function<double(Point)> dy;
        std::vector<double> cx, cy; // exact per-axis basis coefficients
        double lap = 0.0;
    };
    std::vector<Part> parts;
    auto zero_fn = [](Point) { return 0.0; };

    if (dom->dim() == 1) {
        for (int c = 0; c < 2; ++c) {
            const bool right = (c == 1);
            const auto& ax = dom->axis(0);
            Shape1d s = bc == Bc::dirichlet ? dirichlet_shape(ax, right) : neumann_shape(ax, right);
            parts.push_back({data.comps[c],
                             [s](Point p) { return s.val(p.x); },
                             [s](Point p) { return s.der(p.x); },
                             zero_fn,
                             s.coeffs,
                             {},
                             bc == Bc::dirichlet ? 0.0 : neumann_shape_lap(ax.length())});
        }
    } else if (bc == Bc::neumann) {
        // west, east act through x; south, north through y
        for (int c = 0; c < 4; ++c) {
            const bool along_y = (c >= 2);
            const bool right = (c == 1 || c == 3);
            const auto& ax = dom->axis(along_y ? 1 : 0);
            const auto& other = dom->axis(along_y ? 0 : 1);
            Shape1d s = neumann_shape(ax, right);
            Part part;
            part.sig = data.comps[c];
            part.lap = neumann_shape_lap(ax.length());
            if (along_y) {
                part.shape = [s](Point p) { return s.val(p.y); };
                part.dx = zero_fn;
                part.dy = [s](Point p) { return s.der(p.y); };
                part.cx = axis_one_coeffs(other);
                part.cy = s.coeffs;
            } else {
                part.shape = [s](Point p) { return s.val(p.x); };
                part.dx = [s](Point p) { return s.der(p.x); };
                part.dy = zero_fn;
                part.cx = s.coeffs;
                part.cy = axis_one_coeffs(other);
            }
            parts.push_back(std::move(part));
        }
    } else {
        // Dirichlet rectangle with edge-constant data admits a continuous
        // polynomial lifting only when the edge values agree at corners,
        // i.e. all four signals coincide; lift the common value.
        const auto& s0 = data.comps[0];
        for (double t : {0.0, 0.5, 1.0}) {
            const double v = s0(t);
            for (int c = 1; c < 4; ++c)
                if (std::abs(data.comps[c](t) - v) > 1e-12 * (1.0 + std::abs(v)))
                    throw ConfigError(
                        "Lifting: Dirichlet rectangle edge data must agree at corners");
        }
        Part part;
        part.sig = s0;
        part.shape = [](Point) { return 1.0; };
        part.dx = zero_fn;
        part.dy = zero_fn;
        part.cx = axis_one_coeffs(dom->axis(0));
        part.cy = axis_one_coeffs(dom->axis(1));
        parts.push_back(std::move(part));
    }

    const auto& pts = dom->grid_points();
    const auto& fpts = dom->fine_grid_points();
    for (auto& part : parts) {
        Comp comp;
        comp.sig = part.sig;
        comp.shape = part.shape;
        comp.shape_vals.resize(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) comp.shape_vals[i] = comp.shape(pts[i]);
        comp.shape_fine.resize(fpts.size());
        for (size_t i = 0; i < fpts.size(); ++i) comp.shape_fine[i] = comp.shape(fpts[i]);
        if (dom->dim() == 1) {
            comp.shape_coeffs = part.cx;
        } else {
            const int nx = dom->axis(0).n_modes();
            const int ny = dom->axis(1).n_modes();
            comp.shape_coeffs.resize(static_cast<size_t>(nx) * ny);
            for (int ky = 0; ky < ny; ++ky)
                for (int kx = 0; kx < nx; ++kx)
                    comp.shape_coeffs[static_cast<size_t>(ky) * nx + kx] =
                        part.cx[kx] * part.cy[ky];
        }
        comp.grad_fine.resize(dom->dim());
        for (int d = 0; d < dom->dim(); ++d) {
            comp.grad_fine[d].resize(fpts.size());
            const auto& g = d == 0 ? part.dx : part.dy;
            for (size_t i = 0; i < fpts.size(); ++i) comp.grad_fine[d][i] = g(fpts[i]);
        }
        comp.lap_coeffs.assign(dom->total_modes(), 0.0);
        if (part.lap != 0.0) comp.lap_coeffs[0] = part.lap; // constant = cosine mode 0
        // Neumann shapes are zero-mean by construction; Dirichlet interval
        // shapes integrate to L/2, the rectangle common constant to |Omega|.
        if (bc == Bc::neumann)
            comp.mean = 0.0;
        else
            comp.mean = dom->dim() == 1 ? 0.5 : 1.0;
        out.comps_.push_back(std::move(comp));
    }
    return out;
}

std::vector<std::vector<double>> Lifting::signal_series(const TimeGrid& grid,
                                                        int deriv_order) const {
    std::vector<std::vector<double>> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(signal_deriv_series(c.sig, grid, deriv_order));
    return out;
}

double Lifting::eval(double t, Point p) const {
    double s = 0.0;
    for (const auto& c : comps_) s += c.sig(t) * c.shape(p);
    return s;
}

double Lifting::eval_component_shape(int c, Point p) const { return comps_[c].shape(p); }

std::vector<double> Lifting::combine_coeffs(std::span<const double> w) const {
    std::vector<double> out(dom_ ? dom_->total_modes() : 0, 0.0);
    for (size_t c = 0; c < comps_.size(); ++c)
        for (size_t i = 0; i < out.size(); ++i) out[i] += w[c] * comps_[c].shape_coeffs[i];
    return out;
}

std::vector<double> Lifting::combine_values(std::span<const double> w) const {
    std::vector<double> out(dom_ ? dom_->grid_size() : 0, 0.0);
    for (size_t c = 0; c < comps_.size(); ++c)
        for (size_t i = 0; i < out.size(); ++i) out[i] += w[c] * comps_[c].shape_vals[i];
    return out;
}

std::vector<double> Lifting::combine_fine(std::span<const double> w) const {
    std::vector<double> out(dom_ ? dom_->fine_grid_size() : 0, 0.0);
    for (size_t c = 0; c < comps_.size(); ++c)
        for (size_t i = 0; i < out.size(); ++i) out[i] += w[c] * comps_[c].shape_fine[i];
    return out;
}

std::vector<double> Lifting::combine_grad_fine(int axis, std::span<const double> w) const {
    std::vector<double> out(dom_ ? dom_->fine_grid_size() : 0, 0.0);
    for (size_t c = 0; c < comps_.size(); ++c)
        for (size_t i = 0; i < out.size(); ++i) out[i] += w[c] * comps_[c].grad_fine[axis][i];
    return out;
}

std::vector<double> Lifting::combine_lap_coeffs(std::span<const double> w) const {
    std::vector<double> out(dom_ ? dom_->total_modes() : 0, 0.0);
    for (size_t c = 0; c < comps_.size(); ++c)
        for (size_t i = 0; i < out.size(); ++i) out[i] += w[c] * comps_[c].lap_coeffs[i];
    return out;
}

double Lifting::combine_mean(std::span<const double> w) const {
    double s = 0.0;
    for (size_t c = 0; c < comps_.size(); ++c) s += w[c] * comps_[c].mean;
    return s;
}

} // namespace bcx
