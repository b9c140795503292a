#include "bcx/domain.hpp"

#include "bcx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bcx {

namespace {
constexpr double kPi = std::numbers::pi;
}

AxisBasis::AxisBasis(Bc bc, double length, int n_modes)
    : bc_(bc), length_(length), n_modes_(n_modes) {
    if (length <= 0.0) throw ConfigError("AxisBasis: length must be positive");
    if (n_modes < 1) throw ConfigError("AxisBasis: need at least one mode");
    if (bc == Bc::neumann && n_modes < 2)
        throw ConfigError("AxisBasis: cosine basis needs at least two modes");

    const int m = n_modes;
    if (bc == Bc::dirichlet) {
        const int ng = m;
        const int nf = (3 * m + 1) / 2;
        nodes_.resize(ng);
        weights_.assign(ng, length / (ng + 1));
        for (int j = 0; j < ng; ++j) nodes_[j] = length * (j + 1) / (ng + 1);
        fine_nodes_.resize(nf);
        for (int j = 0; j < nf; ++j) fine_nodes_[j] = length * (j + 1) / (nf + 1);
    } else {
        const int ng = m;       // closed grid, K = ng - 1 intervals
        const int nf = (3 * m + 1) / 2;
        nodes_.resize(ng);
        weights_.assign(ng, length / (ng - 1));
        weights_.front() *= 0.5;
        weights_.back() *= 0.5;
        for (int j = 0; j < ng; ++j) nodes_[j] = length * j / (ng - 1);
        fine_nodes_.resize(nf);
        for (int j = 0; j < nf; ++j) fine_nodes_[j] = length * j / (nf - 1);
    }

    const int ng = grid_size();
    const int nf = fine_grid_size();
    phi_.resize(static_cast<size_t>(ng) * m);
    fine_phi_.resize(static_cast<size_t>(nf) * m);
    dphi_fine_.resize(static_cast<size_t>(nf) * m);
    fwd_.resize(static_cast<size_t>(m) * ng);
    fwd_fine_.resize(static_cast<size_t>(m) * nf);

    for (int j = 0; j < ng; ++j)
        for (int k = 0; k < m; ++k) phi_[static_cast<size_t>(j) * m + k] = phi(k, nodes_[j]);
    for (int j = 0; j < nf; ++j)
        for (int k = 0; k < m; ++k) {
            fine_phi_[static_cast<size_t>(j) * m + k] = phi(k, fine_nodes_[j]);
            dphi_fine_[static_cast<size_t>(j) * m + k] = dphi(k, fine_nodes_[j]);
        }

    // Forward weights from discrete orthogonality of the node tables.
    if (bc == Bc::dirichlet) {
        const double sc = 2.0 / (ng + 1);
        const double sf = 2.0 / (nf + 1);
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < ng; ++j)
                fwd_[static_cast<size_t>(k) * ng + j] = sc * phi_[static_cast<size_t>(j) * m + k];
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < nf; ++j)
                fwd_fine_[static_cast<size_t>(k) * nf + j] =
                    sf * fine_phi_[static_cast<size_t>(j) * m + k];
    } else {
        const int kc = ng - 1;
        const int kf = nf - 1;
        auto endw = [](int j, int last) { return (j == 0 || j == last) ? 0.5 : 1.0; };
        for (int k = 0; k < m; ++k) {
            const double nrm = (k == 0 || k == kc) ? kc : kc / 2.0;
            for (int j = 0; j < ng; ++j)
                fwd_[static_cast<size_t>(k) * ng + j] =
                    endw(j, kc) * phi_[static_cast<size_t>(j) * m + k] / nrm;
        }
        for (int k = 0; k < m; ++k) {
            const double nrm = (k == 0 || k == kf) ? kf : kf / 2.0;
            for (int j = 0; j < nf; ++j)
                fwd_fine_[static_cast<size_t>(k) * nf + j] =
                    endw(j, kf) * fine_phi_[static_cast<size_t>(j) * m + k] / nrm;
        }
    }
}

double AxisBasis::phi(int k, double x) const {
    const int m = mode_number(k);
    return bc_ == Bc::dirichlet ? std::sin(m * kPi * x / length_)
                                : std::cos(m * kPi * x / length_);
}

double AxisBasis::dphi(int k, double x) const {
    const int m = mode_number(k);
    const double w = m * kPi / length_;
    return bc_ == Bc::dirichlet ? w * std::cos(m * kPi * x / length_)
                                : -w * std::sin(m * kPi * x / length_);
}

double AxisBasis::eigenvalue(int k) const {
    const double w = mode_number(k) * kPi / length_;
    return w * w;
}

double AxisBasis::basis_l2sq(int k) const {
    if (bc_ == Bc::neumann && mode_number(k) == 0) return length_;
    return length_ / 2.0;
}

double AxisBasis::basis_integral(int k) const {
    const int m = mode_number(k);
    if (bc_ == Bc::dirichlet) return length_ * (1.0 - ((m % 2 == 0) ? 1.0 : -1.0)) / (m * kPi);
    return m == 0 ? length_ : 0.0;
}

void AxisBasis::forward(std::span<const double> values, std::span<double> coeffs) const {
    const int ng = grid_size();
    for (int k = 0; k < n_modes_; ++k) {
        double s = 0.0;
        const double* row = &fwd_[static_cast<size_t>(k) * ng];
        for (int j = 0; j < ng; ++j) s += row[j] * values[j];
        coeffs[k] = s;
    }
}

void AxisBasis::inverse(std::span<const double> coeffs, std::span<double> values) const {
    const int ng = grid_size();
    for (int j = 0; j < ng; ++j) {
        double s = 0.0;
        const double* row = &phi_[static_cast<size_t>(j) * n_modes_];
        for (int k = 0; k < n_modes_; ++k) s += row[k] * coeffs[k];
        values[j] = s;
    }
}

void AxisBasis::inverse_fine(std::span<const double> coeffs, std::span<double> fine_values) const {
    const int nf = fine_grid_size();
    for (int j = 0; j < nf; ++j) {
        double s = 0.0;
        const double* row = &fine_phi_[static_cast<size_t>(j) * n_modes_];
        for (int k = 0; k < n_modes_; ++k) s += row[k] * coeffs[k];
        fine_values[j] = s;
    }
}

void AxisBasis::forward_fine(std::span<const double> fine_values, std::span<double> coeffs) const {
    const int nf = fine_grid_size();
    for (int k = 0; k < n_modes_; ++k) {
        double s = 0.0;
        const double* row = &fwd_fine_[static_cast<size_t>(k) * nf];
        for (int j = 0; j < nf; ++j) s += row[j] * fine_values[j];
        coeffs[k] = s;
    }
}

void AxisBasis::deriv_fine(std::span<const double> coeffs, std::span<double> fine_values) const {
    const int nf = fine_grid_size();
    for (int j = 0; j < nf; ++j) {
        double s = 0.0;
        const double* row = &dphi_fine_[static_cast<size_t>(j) * n_modes_];
        for (int k = 0; k < n_modes_; ++k) s += row[k] * coeffs[k];
        fine_values[j] = s;
    }
}

double AxisBasis::eval(std::span<const double> coeffs, double x) const {
    double s = 0.0;
    for (int k = 0; k < n_modes_; ++k) s += coeffs[k] * phi(k, x);
    return s;
}

double AxisBasis::eval_deriv(std::span<const double> coeffs, double x) const {
    double s = 0.0;
    for (int k = 0; k < n_modes_; ++k) s += coeffs[k] * dphi(k, x);
    return s;
}

SpectralDomain::SpectralDomain(std::vector<AxisBasis> axes) : axes_(std::move(axes)) {
    if (dim() == 1) {
        const auto& ax = axes_[0];
        grid_points_.reserve(ax.grid_size());
        for (double x : ax.nodes()) grid_points_.push_back({x, 0.0});
        fine_grid_points_.reserve(ax.fine_grid_size());
        for (double x : ax.fine_nodes()) fine_grid_points_.push_back({x, 0.0});
        grid_weights_ = ax.quad_weights();
    } else {
        const auto& ax = axes_[0];
        const auto& ay = axes_[1];
        for (double y : ay.nodes())
            for (double x : ax.nodes()) grid_points_.push_back({x, y});
        for (double y : ay.fine_nodes())
            for (double x : ax.fine_nodes()) fine_grid_points_.push_back({x, y});
        for (double wy : ay.quad_weights())
            for (double wx : ax.quad_weights()) grid_weights_.push_back(wx * wy);
    }
}

DomainPtr SpectralDomain::interval(Bc bc, double length, int n_modes) {
    std::vector<AxisBasis> axes;
    axes.emplace_back(bc, length, n_modes);
    return DomainPtr(new SpectralDomain(std::move(axes)));
}

DomainPtr SpectralDomain::rectangle(Bc bc, double lx, double ly, int nx_modes, int ny_modes) {
    std::vector<AxisBasis> axes;
    axes.emplace_back(bc, lx, nx_modes);
    axes.emplace_back(bc, ly, ny_modes);
    return DomainPtr(new SpectralDomain(std::move(axes)));
}

int SpectralDomain::total_modes() const {
    int n = 1;
    for (const auto& a : axes_) n *= a.n_modes();
    return n;
}

int SpectralDomain::grid_size() const {
    int n = 1;
    for (const auto& a : axes_) n *= a.grid_size();
    return n;
}

int SpectralDomain::fine_grid_size() const {
    int n = 1;
    for (const auto& a : axes_) n *= a.fine_grid_size();
    return n;
}

double SpectralDomain::measure() const {
    double v = 1.0;
    for (const auto& a : axes_) v *= a.length();
    return v;
}

double SpectralDomain::boundary_measure() const {
    if (dim() == 1) return 2.0;
    return 2.0 * (axes_[0].length() + axes_[1].length());
}

int SpectralDomain::flat_index(int kx, int ky) const {
    return ky * axes_[0].n_modes() + kx;
}

ModeIndex SpectralDomain::mode_index(int flat) const {
    const int nx = axes_[0].n_modes();
    const int kx = flat % nx;
    const int ky = flat / nx;
    ModeIndex mi;
    mi.ix = axes_[0].mode_number(kx);
    mi.iy = dim() == 2 ? axes_[1].mode_number(ky) : 0;
    return mi;
}

double SpectralDomain::eigenvalue_flat(int flat) const {
    const int nx = axes_[0].n_modes();
    double lam = axes_[0].eigenvalue(flat % nx);
    if (dim() == 2) lam += axes_[1].eigenvalue(flat / nx);
    return lam;
}

double SpectralDomain::basis_l2sq_flat(int flat) const {
    const int nx = axes_[0].n_modes();
    double v = axes_[0].basis_l2sq(flat % nx);
    if (dim() == 2) v *= axes_[1].basis_l2sq(flat / nx);
    return v;
}

std::vector<std::pair<double, ModeIndex>> SpectralDomain::eigenpairs() const {
    std::vector<std::pair<double, ModeIndex>> out;
    out.reserve(total_modes());
    for (int i = 0; i < total_modes(); ++i) out.emplace_back(eigenvalue_flat(i), mode_index(i));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        if (a.second.ix != b.second.ix) return a.second.ix < b.second.ix;
        return a.second.iy < b.second.iy;
    });
    return out;
}

namespace {

// Apply a per-axis linear map along x (rows) then y (columns).
template <typename FX, typename FY>
std::vector<double> tensor_apply(int nx_in, int ny_in, int nx_out, int ny_out,
                                 std::span<const double> in, FX&& fx, FY&& fy) {
    std::vector<double> mid(static_cast<size_t>(ny_in) * nx_out);
    for (int r = 0; r < ny_in; ++r)
        fx(in.subspan(static_cast<size_t>(r) * nx_in, nx_in),
           std::span<double>(&mid[static_cast<size_t>(r) * nx_out], nx_out));
    std::vector<double> out(static_cast<size_t>(ny_out) * nx_out);
    std::vector<double> col_in(ny_in), col_out(ny_out);
    for (int c = 0; c < nx_out; ++c) {
        for (int r = 0; r < ny_in; ++r) col_in[r] = mid[static_cast<size_t>(r) * nx_out + c];
        fy(std::span<const double>(col_in), std::span<double>(col_out));
        for (int r = 0; r < ny_out; ++r) out[static_cast<size_t>(r) * nx_out + c] = col_out[r];
    }
    return out;
}

} // namespace

std::vector<double> SpectralDomain::forward(std::span<const double> values) const {
    if (static_cast<int>(values.size()) != grid_size())
        throw ConfigError("forward: value array does not match domain grid");
    if (dim() == 1) {
        std::vector<double> c(total_modes());
        axes_[0].forward(values, c);
        return c;
    }
    const auto& ax = axes_[0];
    const auto& ay = axes_[1];
    return tensor_apply(
        ax.grid_size(), ay.grid_size(), ax.n_modes(), ay.n_modes(), values,
        [&](auto in, auto out) { ax.forward(in, out); },
        [&](auto in, auto out) { ay.forward(in, out); });
}

std::vector<double> SpectralDomain::inverse(std::span<const double> coeffs) const {
    if (static_cast<int>(coeffs.size()) != total_modes())
        throw ConfigError("inverse: coefficient array does not match domain");
    if (dim() == 1) {
        std::vector<double> v(grid_size());
        axes_[0].inverse(coeffs, v);
        return v;
    }
    const auto& ax = axes_[0];
    const auto& ay = axes_[1];
    return tensor_apply(
        ax.n_modes(), ay.n_modes(), ax.grid_size(), ay.grid_size(), coeffs,
        [&](auto in, auto out) { ax.inverse(in, out); },
        [&](auto in, auto out) { ay.inverse(in, out); });
}

std::vector<double> SpectralDomain::inverse_fine(std::span<const double> coeffs) const {
    if (dim() == 1) {
        std::vector<double> v(fine_grid_size());
        axes_[0].inverse_fine(coeffs, v);
        return v;
    }
    const auto& ax = axes_[0];
    const auto& ay = axes_[1];
    return tensor_apply(
        ax.n_modes(), ay.n_modes(), ax.fine_grid_size(), ay.fine_grid_size(), coeffs,
        [&](auto in, auto out) { ax.inverse_fine(in, out); },
        [&](auto in, auto out) { ay.inverse_fine(in, out); });
}

std::vector<double> SpectralDomain::forward_fine(std::span<const double> fine_values) const {
    if (dim() == 1) {
        std::vector<double> c(total_modes());
        axes_[0].forward_fine(fine_values, c);
        return c;
    }
    const auto& ax = axes_[0];
    const auto& ay = axes_[1];
    return tensor_apply(
        ax.fine_grid_size(), ay.fine_grid_size(), ax.n_modes(), ay.n_modes(), fine_values,
        [&](auto in, auto out) { ax.forward_fine(in, out); },
        [&](auto in, auto out) { ay.forward_fine(in, out); });
}

std::vector<double> SpectralDomain::laplacian(std::span<const double> coeffs) const {
    std::vector<double> out(coeffs.begin(), coeffs.end());
    for (int i = 0; i < total_modes(); ++i) out[i] *= -eigenvalue_flat(i);
    return out;
}

std::vector<std::vector<double>> SpectralDomain::gradient_fine(std::span<const double> coeffs) const {
    std::vector<std::vector<double>> out;
    if (dim() == 1) {
        std::vector<double> v(fine_grid_size());
        axes_[0].deriv_fine(coeffs, v);
        out.push_back(std::move(v));
        return out;
    }
    const auto& ax = axes_[0];
    const auto& ay = axes_[1];
    out.push_back(tensor_apply(
        ax.n_modes(), ay.n_modes(), ax.fine_grid_size(), ay.fine_grid_size(), coeffs,
        [&](auto in, auto o) { ax.deriv_fine(in, o); },
        [&](auto in, auto o) { ay.inverse_fine(in, o); }));
    out.push_back(tensor_apply(
        ax.n_modes(), ay.n_modes(), ax.fine_grid_size(), ay.fine_grid_size(), coeffs,
        [&](auto in, auto o) { ax.inverse_fine(in, o); },
        [&](auto in, auto o) { ay.deriv_fine(in, o); }));
    return out;
}

double SpectralDomain::eval(std::span<const double> coeffs, Point p) const {
    if (dim() == 1) return axes_[0].eval(coeffs, p.x);
    const auto& ax = axes_[0];
    const auto& ay = axes_[1];
    std::vector<double> row(ay.n_modes());
    for (int ky = 0; ky < ay.n_modes(); ++ky)
        row[ky] = ax.eval(coeffs.subspan(static_cast<size_t>(ky) * ax.n_modes(), ax.n_modes()), p.x);
    return ay.eval(row, p.y);
}

double SpectralDomain::mean(std::span<const double> coeffs) const {
    double s = 0.0;
    const int nx = axes_[0].n_modes();
    for (int i = 0; i < total_modes(); ++i) {
        double v = axes_[0].basis_integral(i % nx);
        if (dim() == 2) v *= axes_[1].basis_integral(i / nx);
        s += coeffs[i] * v;
    }
    return s / measure();
}

double SpectralDomain::mean_values(std::span<const double> values) const {
    double s = 0.0;
    for (int i = 0; i < grid_size(); ++i) s += grid_weights_[i] * values[i];
    return s / measure();
}

double SpectralDomain::l2_norm(std::span<const double> coeffs) const {
    double s = 0.0;
    for (int i = 0; i < total_modes(); ++i) s += coeffs[i] * coeffs[i] * basis_l2sq_flat(i);
    return std::sqrt(s);
}

GridFunction GridFunction::from_values(DomainPtr dom, std::vector<double> values) {
    if (static_cast<int>(values.size()) != dom->grid_size())
        throw ConfigError("GridFunction: value array does not match domain grid");
    GridFunction f;
    f.dom_ = std::move(dom);
    f.values_ = std::move(values);
    return f;
}

GridFunction GridFunction::from_coeffs(DomainPtr dom, std::vector<double> coeffs) {
    if (static_cast<int>(coeffs.size()) != dom->total_modes())
        throw ConfigError("GridFunction: coefficient array does not match domain");
    GridFunction f;
    f.dom_ = std::move(dom);
    f.coeffs_ = std::move(coeffs);
    return f;
}

GridFunction GridFunction::from_both(DomainPtr dom, std::vector<double> values,
                                     std::vector<double> coeffs) {
    GridFunction f = from_values(dom, std::move(values));
    if (static_cast<int>(coeffs.size()) != f.dom_->total_modes())
        throw ConfigError("GridFunction: coefficient array does not match domain");
    f.coeffs_ = std::move(coeffs);
    return f;
}

GridFunction GridFunction::zero(DomainPtr dom) {
    std::vector<double> c(dom->total_modes(), 0.0);
    return from_coeffs(std::move(dom), std::move(c));
}

const std::vector<double>& GridFunction::coeffs() const {
    if (!coeffs_) coeffs_ = dom_->forward(*values_);
    return *coeffs_;
}

const std::vector<double>& GridFunction::values() const {
    if (!values_) values_ = dom_->inverse(*coeffs_);
    return *values_;
}

double GridFunction::mean() const {
    if (coeffs_) return dom_->mean(*coeffs_);
    return dom_->mean_values(*values_);
}

double GridFunction::l2_norm() const { return dom_->l2_norm(coeffs()); }

double GridFunction::eval(Point p) const { return dom_->eval(coeffs(), p); }

GridFunction transform(const GridFunction& f) {
    return GridFunction::from_coeffs(f.domain(), f.coeffs());
}

GridFunction inverse_transform(const GridFunction& f) {
    return GridFunction::from_values(f.domain(), f.values());
}

GridFunction project_mean_zero(const GridFunction& f) {
    const auto& dom = f.domain();
    if (dom->bc() != Bc::neumann)
        throw ConfigError("project_mean_zero: requires a Neumann domain");
    std::vector<double> c = f.coeffs();
    c[0] = 0.0; // constant mode carries the mean exactly
    return GridFunction::from_coeffs(dom, std::move(c));
}

GridFunction dealiased_product(const GridFunction& f, const GridFunction& g) {
    if (f.domain() != g.domain())
        throw ConfigError("dealiased_product: operands live on different domains");
    const auto& dom = f.domain();
    const auto ff = dom->inverse_fine(f.coeffs());
    const auto gf = dom->inverse_fine(g.coeffs());
    std::vector<double> prod(ff.size());
    for (size_t i = 0; i < ff.size(); ++i) prod[i] = ff[i] * gf[i];
    auto coeffs = dom->forward_fine(prod);

    const auto& fv = f.values();
    const auto& gv = g.values();
    std::vector<double> vals(fv.size());
    for (size_t i = 0; i < fv.size(); ++i) vals[i] = fv[i] * gv[i];
    return GridFunction::from_both(dom, std::move(vals), std::move(coeffs));
}

} // namespace bcx
