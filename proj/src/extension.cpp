#include "bcx/extension.hpp"

#include "bcx/errors.hpp"
#include "bcx/smallmat.hpp"

#include <cmath>

namespace bcx {

namespace {

// Exact Gaussian elimination over Fractions.
std::vector<std::vector<Fraction>> solve_rational(std::vector<std::vector<Fraction>> a,
                                                  std::vector<std::vector<Fraction>> rhs) {
    const int n = static_cast<int>(a.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        while (piv < n && a[piv][k] == Fraction(0)) ++piv;
        if (piv == n) throw NumericalError("solve_rational: singular system");
        std::swap(a[piv], a[k]);
        std::swap(rhs[piv], rhs[k]);
        for (int i = k + 1; i < n; ++i) {
            if (a[i][k] == Fraction(0)) continue;
            Fraction m = a[i][k] / a[k][k];
            for (int j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            for (size_t j = 0; j < rhs[i].size(); ++j) rhs[i][j] -= m * rhs[k][j];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (size_t j = 0; j < rhs[k].size(); ++j) {
            Fraction s = rhs[k][j];
            for (int i = k + 1; i < n; ++i) s -= a[k][i] * rhs[i][j];
            rhs[k][j] = s / a[k][k];
        }
    }
    return rhs;
}

Mat system_matrix(int l) {
    // rows m = 0..l, columns i = 0..l: (-(1+i))^m
    Mat w(l + 1, l + 1);
    for (int m = 0; m <= l; ++m)
        for (int i = 0; i <= l; ++i) w(m, i) = std::pow(-(1.0 + i), m);
    return w;
}

} // namespace

double VandermondeCoeffs::residual() const {
    // cancellation-aware: each defining row is normalized by its term scale
    double res = 0.0;
    for (int j = 0; j <= l; ++j)
        for (int m = 0; m <= l; ++m) {
            double s = 0.0, scale = 1.0;
            for (int i = 0; i <= l; ++i) {
                const double term = c[i][j] * std::pow(-(1.0 + i), m);
                s += term;
                scale = std::max(scale, std::abs(term));
            }
            res = std::max(res, std::abs(s - (m == j ? 1.0 : 0.0)) / scale);
        }
    return res;
}

VandermondeCoeffs vandermonde_coeffs(int l) {
    if (l < 0) throw ConfigError("vandermonde_coeffs: l must be nonnegative");
    VandermondeCoeffs out;
    out.l = l;
    out.c.assign(l + 1, std::vector<double>(l + 1, 0.0));

    if (l <= 8) {
        std::vector<std::vector<Fraction>> a(l + 1, std::vector<Fraction>(l + 1));
        std::vector<std::vector<Fraction>> rhs(l + 1, std::vector<Fraction>(l + 1, Fraction(0)));
        for (int m = 0; m <= l; ++m) {
            for (int i = 0; i <= l; ++i) {
                long long v = 1;
                for (int q = 0; q < m; ++q) v *= -(1 + i);
                a[m][i] = Fraction(v);
            }
            rhs[m][m] = Fraction(1);
        }
        auto sol = solve_rational(std::move(a), std::move(rhs)); // sol[i][j] = c_ij
        out.exact = sol;
        for (int i = 0; i <= l; ++i)
            for (int j = 0; j <= l; ++j) out.c[i][j] = sol[i][j].value();
        return out;
    }

    Mat w = system_matrix(l);
    const double cond = cond_1(w);
    if (cond > 1e12)
        throw IllConditionedError("vandermonde_coeffs: system condition " + std::to_string(cond) +
                                  " exceeds 1e12 at l = " + std::to_string(l));
    Lu lu(w);
    for (int j = 0; j <= l; ++j) {
        std::vector<double> e(l + 1, 0.0);
        e[j] = 1.0;
        auto col = lu.solve(e);
        for (int i = 0; i <= l; ++i) out.c[i][j] = col[i];
    }
    return out;
}

double vandermonde_det(int l) {
    // V[m][i] = (1+i)^m on nodes 1..l+1
    Mat v(l + 1, l + 1);
    for (int m = 0; m <= l; ++m)
        for (int i = 0; i <= l; ++i) v(m, i) = std::pow(1.0 + i, m);
    return Lu(v).det();
}

double vandermonde_det_formula(int l) {
    double p = 1.0;
    double fact = 1.0;
    for (int j = 1; j <= l; ++j) {
        fact *= j;
        p *= fact;
    }
    return p;
}

ExtensionResult extend(const std::vector<GridFunction>& prescribed, const TimeGrid& grid) {
    if (prescribed.empty()) throw ConfigError("extend: need at least one prescribed derivative");
    const int l = static_cast<int>(prescribed.size()) - 1;
    const auto dom = prescribed[0].domain();
    for (const auto& x : prescribed)
        if (x.domain() != dom) throw ConfigError("extend: mixed domains");

    auto vc = vandermonde_coeffs(l);
    const int nm = dom->total_modes();

    ExtensionResult out;
    out.grid = grid;
    out.domain = dom;
    out.coeff_series.assign(grid.size(), std::vector<double>(nm, 0.0));

    for (int n = 0; n < grid.size(); ++n) {
        const double t = grid.time(n);
        auto& row = out.coeff_series[n];
        for (int m = 0; m < nm; ++m) {
            const double alpha = 1.0 + dom->eigenvalue_flat(m); // shifted generator, invertible
            double acc = 0.0;
            double apow = 1.0; // alpha^{-j}
            for (int j = 0; j <= l; ++j) {
                double semi = 0.0;
                for (int i = 0; i <= l; ++i) semi += vc.c[i][j] * std::exp(-t * (1.0 + i) * alpha);
                acc += semi * apow * prescribed[j].coeffs()[m];
                apow /= alpha;
            }
            row[m] = acc;
        }
    }
    return out;
}

} // namespace bcx
