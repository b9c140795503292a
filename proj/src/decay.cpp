#include "bcx/decay.hpp"

#include "bcx/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bcx {

double sobolev_norm(const SpectralDomain& dom, std::span<const double> coeffs, double order) {
    if (order < 0.0) throw ConfigError("sobolev_norm: order must be nonnegative");
    double s = 0.0;
    for (int i = 0; i < dom.total_modes(); ++i) {
        const double w = std::pow(1.0 + dom.eigenvalue_flat(i), order / 2.0);
        s += w * coeffs[i] * coeffs[i] * dom.basis_l2sq_flat(i);
    }
    return std::sqrt(s);
}

namespace {

DecayFit log_line(std::span<const double> t, std::span<const double> y, double t_begin,
                  double t_end, int min_samples) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_begin || t[i] > t_end) continue;
        if (y[i] <= 1e-14)
            throw NumericalError(
                "fit_decay: channel underflow inside the window; shrink the window "
                "(end before t = " + std::to_string(t[i]) + ")");
        const double ly = std::log(y[i]);
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
        syy += ly * ly;
        ++n;
    }
    if (n < min_samples)
        throw ConfigError("fit_decay: window holds fewer than " + std::to_string(min_samples) +
                          " samples");
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;
    DecayFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.n_samples = n;
    const double ss_tot = syy - sy * sy / n;
    const double ss_res = ss_tot - slope * (sxy - sx * sy / n);
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.exponential = fit.r2 >= 0.999;
    return fit;
}

} // namespace

DecayFit fit_decay(std::span<const double> t, std::span<const double> y, double t_begin,
                   double t_end) {
    return log_line(t, y, t_begin, t_end, 20);
}

DecayFit fit_decay(const NormSeries& series, const std::string& channel, double t_begin,
                   double t_end) {
    return fit_decay(series.t, series.channel(channel), t_begin, t_end);
}

DecayFit fit_decay_robust(std::span<const double> t, std::span<const double> y, double t_begin,
                          double t_end) {
    std::vector<double> tp, yp;
    for (size_t i = 1; i + 1 < t.size(); ++i) {
        if (t[i] < t_begin || t[i] > t_end) continue;
        if (y[i] >= y[i - 1] && y[i] >= y[i + 1]) {
            tp.push_back(t[i]);
            yp.push_back(y[i]);
        }
    }
    if (tp.size() < 6) return fit_decay(t, y, t_begin, t_end);
    return log_line(tp, yp, t_begin, t_end, 6);
}

DecayFit fit_decay_robust(const NormSeries& series, const std::string& channel, double t_begin,
                          double t_end) {
    return fit_decay_robust(series.t, series.channel(channel), t_begin, t_end);
}

RateComparison compare_omega0(double measured_rate, const PdeParams& p, const SpectralDomain& dom,
                              double rel_tol) {
    RateComparison rc;
    rc.measured = measured_rate;
    rc.omega0 = omega0(p, dom).omega0;
    // rate of the first admissible mode: the one that governs generic
    // low-mode data (in the accumulation regime it exceeds omega0)
    const double ls = lambda_star(dom);
    rc.slowest_mode_rate = -abscissa_over_modes(p, std::vector<double>{ls});
    rc.rel_error_vs_mode = std::abs(measured_rate - rc.slowest_mode_rate) / rc.slowest_mode_rate;
    const double floor_rate = 0.99 * std::min(rc.omega0, rc.slowest_mode_rate);
    rc.pass = measured_rate >= floor_rate && rc.rel_error_vs_mode <= rel_tol;
    return rc;
}

} // namespace bcx
