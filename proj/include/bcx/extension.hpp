#pragma once

#include "bcx/domain.hpp"
#include "bcx/fraction.hpp"
#include "bcx/signals.hpp"

#include <vector>

namespace bcx {

// Weights c[i][j] solving sum_i c_ij (-(1+i))^m = delta_mj for m = 0..l.
// Solved exactly in rational arithmetic for l <= 8, in floating point with a
// conditioning guard beyond.
struct VandermondeCoeffs {
    int l = 0;
    std::vector<std::vector<Fraction>> exact; // empty when l > 8
    std::vector<std::vector<double>> c;       // always populated, c[i][j]

    double residual() const; // max |sum_i c_ij (-(1+i))^m - delta_mj|
};

VandermondeCoeffs vandermonde_coeffs(int l);

// |det V| of the (l+1)x(l+1) Vandermonde matrix on nodes 1..l+1, both by
// elimination and by the product formula prod_{j=1}^{l} j!.
double vandermonde_det(int l);
double vandermonde_det_formula(int l);

// S(t) = sum_j S_j x_j with (S_j x)(t) = sum_i c_ij e^{-t(1+i)A} A^{-j} x,
// realized per mode with the scalar generator alpha_m = 1 + lambda_m.  The
// result satisfies d_t^m S(0) = x_m for m <= l and decays at least like
// e^{-t}.
struct ExtensionResult {
    TimeGrid grid;
    DomainPtr domain;
    std::vector<std::vector<double>> coeff_series; // per node: spectral coefficients
};

ExtensionResult extend(const std::vector<GridFunction>& prescribed, const TimeGrid& grid);

} // namespace bcx
