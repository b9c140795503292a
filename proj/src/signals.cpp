#include "bcx/signals.hpp"

#include "bcx/errors.hpp"
#include "bcx/fd.hpp"

#include <cmath>

namespace bcx {

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(size());
    for (int i = 0; i < size(); ++i) t[i] = time(i);
    return t;
}

TimeSignal::TimeSignal(double constant)
    : fn_([constant](double) { return constant; }), const_zero_(constant == 0.0) {}

TimeSignal::TimeSignal(std::function<double(double)> fn) : fn_(std::move(fn)) {}

TimeSignal TimeSignal::sampled(TimeGrid grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.size())
        throw ConfigError("TimeSignal: sample count does not match grid");
    TimeSignal s;
    s.sampled_ = true;
    s.const_zero_ = false;
    s.grid_ = grid;
    s.values_ = std::move(values);
    s.fn_ = nullptr;
    return s;
}

double TimeSignal::operator()(double t) const {
    if (!sampled_) return fn_(t);
    const double u = (t - grid_.t0) / grid_.dt;
    int i = static_cast<int>(std::floor(u));
    i = std::max(0, std::min(i, grid_.n_steps - 1));
    const double w = u - i;
    return values_[i] * (1.0 - w) + values_[i + 1] * w;
}

double fd_deriv1_right(const std::function<double(double)>& f, double t0, double h) {
    return fd_deriv_onesided(f, t0, h, 1, 5);
}

double fd_deriv2_right(const std::function<double(double)>& f, double t0, double h) {
    return fd_deriv_onesided(f, t0, h, 2, 6);
}

double fd_deriv3_right(const std::function<double(double)>& f, double t0, double h) {
    return fd_deriv_onesided(f, t0, h, 3, 7);
}

double signal_derivative(const TimeSignal& s, double t, int order) {
    if (order == 0) return s(t);
    if (s.is_sampled()) {
        if (order == 1) return s.deriv(t);
        throw ConfigError("signal_derivative: sampled signals support order <= 1 here");
    }
    auto f = [&s](double u) { return s(u); };
    if (order == 1) {
        const double h = 1e-3;
        if (t < 2.0 * h) return fd_deriv1_right(f, t, 1e-2);
        auto d = [&](double w) { return (f(t + w) - f(t - w)) / (2.0 * w); };
        return (4.0 * d(h) - d(2.0 * h)) / 3.0;
    }
    if (order == 2) {
        const double h = 2e-3;
        if (t < 2.0 * h) return fd_deriv2_right(f, t, 2e-2);
        auto d = [&](double w) { return (f(t + w) - 2.0 * f(t) + f(t - w)) / (w * w); };
        return (4.0 * d(h) - d(2.0 * h)) / 3.0;
    }
    if (order == 3) {
        const double h = 5e-3;
        if (t < 3.0 * h) return fd_deriv3_right(f, t, 3e-2);
        auto d = [&](double w) {
            return (f(t + 2 * w) - 2.0 * f(t + w) + 2.0 * f(t - w) - f(t - 2 * w)) /
                   (2.0 * w * w * w);
        };
        return (4.0 * d(h) - d(2.0 * h)) / 3.0;
    }
    throw ConfigError("signal_derivative: order not supported");
}

double TimeSignal::deriv0(int j) const {
    if (j == 0) return (*this)(sampled_ ? grid_.t0 : 0.0);
    if (const_zero_) return 0.0;
    if (sampled_) {
        const double dt = grid_.dt;
        const auto& v = values_;
        if (j == 1) {
            if (grid_.size() < 3) throw ConfigError("TimeSignal: too few samples for derivative");
            return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
        }
        if (j == 2) {
            if (grid_.size() < 4) throw ConfigError("TimeSignal: too few samples for derivative");
            return (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (dt * dt);
        }
        if (j == 3) {
            if (grid_.size() < 5) throw ConfigError("TimeSignal: too few samples for derivative");
            return (-5.0 * v[0] + 18.0 * v[1] - 24.0 * v[2] + 14.0 * v[3] - 3.0 * v[4]) /
                   (2.0 * dt * dt * dt);
        }
    } else {
        if (j == 1) return fd_deriv1_right(fn_, 0.0, 1e-2);
        if (j == 2) return fd_deriv2_right(fn_, 0.0, 2e-2);
        if (j == 3) return fd_deriv3_right(fn_, 0.0, 3e-2);
    }
    throw ConfigError("TimeSignal: derivative order not supported");
}

double TimeSignal::deriv(double t) const {
    if (sampled_) {
        const double dt = grid_.dt;
        const auto& v = values_;
        const int n = grid_.size();
        int i = static_cast<int>(std::llround((t - grid_.t0) / dt));
        i = std::max(0, std::min(i, n - 1));
        if (n < 3) throw ConfigError("TimeSignal: too few samples for derivative");
        if (i == 0) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
        if (i == n - 1) return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
        return (v[i + 1] - v[i - 1]) / (2.0 * dt);
    }
    const double h = 1e-3;
    if (t < 2.0 * h) return fd_deriv1_right(fn_, t, 1e-2);
    auto d = [&](double s) { return (fn_(t + s) - fn_(t - s)) / (2.0 * s); };
    return (4.0 * d(h) - d(2.0 * h)) / 3.0;
}

std::vector<double> TimeSignal::sample(const TimeGrid& grid) const {
    std::vector<double> out(grid.size());
    for (int i = 0; i < grid.size(); ++i) out[i] = (*this)(grid.time(i));
    return out;
}

SpaceField SpaceField::zero() { return SpaceField(); }

double SpaceField::eval(Point p) const {
    if (!fn_) throw ConfigError("SpaceField: not analytic");
    return fn_(p);
}

GridFunction SpaceField::discretize(const DomainPtr& dom) const {
    if (fn_) {
        std::vector<double> v(dom->grid_size());
        const auto& pts = dom->grid_points();
        for (size_t i = 0; i < pts.size(); ++i) v[i] = fn_(pts[i]);
        return GridFunction::from_values(dom, std::move(v));
    }
    if (!grid_.empty()) {
        if (grid_.domain() != dom)
            throw ConfigError("SpaceField: grid function lives on a different domain");
        return grid_;
    }
    return GridFunction::zero(dom);
}

std::vector<double> SpaceTimeField::sample(const DomainPtr& dom, double t) const {
    std::vector<double> v(dom->grid_size(), 0.0);
    if (!fn_) return v;
    const auto& pts = dom->grid_points();
    for (size_t i = 0; i < pts.size(); ++i) v[i] = fn_(t, pts[i]);
    return v;
}

std::vector<double> SpaceTimeField::deriv0_values(const DomainPtr& dom, int j) const {
    std::vector<double> v(dom->grid_size(), 0.0);
    if (!fn_) return v;
    const auto& pts = dom->grid_points();
    for (size_t i = 0; i < pts.size(); ++i) {
        const Point p = pts[i];
        auto slice = [this, p](double t) { return fn_(t, p); };
        if (j == 0) v[i] = fn_(0.0, p);
        else if (j == 1) v[i] = fd_deriv1_right(slice, 0.0, 1e-2);
        else if (j == 2) v[i] = fd_deriv2_right(slice, 0.0, 2e-2);
        else throw ConfigError("SpaceTimeField: derivative order not supported");
    }
    return v;
}

std::vector<double> series_derivative(const TimeGrid& grid, std::span<const double> f) {
    const int n = grid.size();
    const double h = grid.dt;
    std::vector<double> d(n);
    if (n < 3) throw ConfigError("series_derivative: too few samples");
    if (n < 5) {
        for (int i = 0; i < n; ++i) {
            if (i == 0) d[i] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
            else if (i == n - 1) d[i] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
            else d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        return d;
    }
    static const double e0[] = {-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0};
    static const double e1[] = {-1.0 / 4.0, -5.0 / 6.0, 3.0 / 2.0, -1.0 / 2.0, 1.0 / 12.0};
    auto dot5 = [&](const double* w, int base, int dir) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += w[k] * f[base + dir * k];
        return dir * s / h;
    };
    d[0] = dot5(e0, 0, 1);
    d[1] = dot5(e1, 0, 1);
    d[n - 1] = dot5(e0, n - 1, -1);
    d[n - 2] = dot5(e1, n - 1, -1);
    for (int i = 2; i < n - 2; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    return d;
}

std::vector<double> signal_deriv_series(const TimeSignal& s, const TimeGrid& grid, int order) {
    if (order == 0) return s.sample(grid);
    if (s.is_sampled()) {
        std::vector<double> row = s.sample(grid);
        TimeGrid g = grid;
        for (int d = 0; d < order; ++d) row = series_derivative(g, row);
        return row;
    }
    std::vector<double> row(grid.size());
    for (int i = 0; i < grid.size(); ++i) row[i] = signal_derivative(s, grid.time(i), order);
    return row;
}

std::vector<double> cumulative_integral(const TimeGrid& grid, std::span<const double> f) {
    const int n = grid.size();
    const double dt = grid.dt;
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    double acc = 0.0;
    for (int i = 1; i < n; ++i) {
        acc += 0.5 * dt * (f[i - 1] + f[i]);
        out[i] = acc;
    }
    if (n < 5) return out;
    // Gregory correction: integral = trapezoid - dt^2/12 (f'(t) - f'(0)),
    // with fourth-order derivative estimates (cubic integrands stay exact).
    auto d = series_derivative(grid, f);
    for (int i = 1; i < n; ++i) out[i] -= dt * dt / 12.0 * (d[i] - d[0]);
    return out;
}

} // namespace bcx
