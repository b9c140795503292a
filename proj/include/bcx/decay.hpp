#pragma once

#include "bcx/block_operator.hpp"
#include "bcx/domain.hpp"
#include "bcx/problem.hpp"

#include <string>

namespace bcx {

// Spectral Sobolev surrogate: ||f||_s^2 = sum_m (1 + lambda_m)^{s/2} |c_m|^2
// ||phi_m||^2.  Order 0 is the exact L2 norm (Parseval); the family is
// monotone in the order.  Rates fitted from these channels are independent
// of the chosen weight convention.
double sobolev_norm(const SpectralDomain& dom, std::span<const double> coeffs, double order);

struct DecayFit {
    double rate = 0.0;      // -slope of the log-linear fit
    double amplitude = 0.0; // exp(intercept)
    double r2 = 0.0;
    int n_samples = 0;
    bool exponential = true; // r2 >= 0.999; poor fits are flagged, not failed
};

// Least-squares line on (t, log y) over [t_begin, t_end].  Throws
// NumericalError with a shrink-window suggestion when the channel underflows
// (values <= 1e-14) inside the window.
DecayFit fit_decay(std::span<const double> t, std::span<const double> y, double t_begin,
                   double t_end);
DecayFit fit_decay(const NormSeries& series, const std::string& channel, double t_begin,
                   double t_end);

// Envelope-aware variant: an oscillatory channel passes through near-zeros
// whose log dips bias the plain fit, so when the window holds enough local
// maxima the line is fitted through the peaks; monotone channels fall back
// to the plain fit.
DecayFit fit_decay_robust(std::span<const double> t, std::span<const double> y, double t_begin,
                          double t_end);
DecayFit fit_decay_robust(const NormSeries& series, const std::string& channel, double t_begin,
                          double t_end);

struct RateComparison {
    double measured = 0.0;
    double omega0 = 0.0;
    double slowest_mode_rate = 0.0; // decay rate of the slowest retained mode
    double rel_error_vs_mode = 0.0;
    bool pass = false;
};

// PASS when the measured rate is at least 0.99 min(omega0, slowest mode
// rate) and within rel_tol of the slowest retained-mode rate.
RateComparison compare_omega0(double measured_rate, const PdeParams& p, const SpectralDomain& dom,
                              double rel_tol = 0.01);

} // namespace bcx
