#include "bcx/block_operator.hpp"

#include "bcx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcx {

PdeParams PdeParams::from_b_over_a(double a, double b, double c, double b_over_a, int s) {
    PdeParams p;
    p.a = a;
    p.b = b;
    p.c = c;
    p.s = s;
    p.k = (s == 1) ? (b_over_a / 2.0) / (c * c) : (1.0 + b_over_a / 2.0) / (c * c);
    p.validate();
    return p;
}

void PdeParams::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw ConfigError("PdeParams: a, b, c must be strictly positive");
    if (k < 0.0) throw ConfigError("PdeParams: k must be nonnegative");
    if (s != 0 && s != 1) throw ConfigError("PdeParams: s must be 0 or 1");
}

ModeBlock mode_matrix(double lambda, const PdeParams& p) {
    if (lambda < 0.0) throw ConfigError("mode_matrix: negative eigenvalue");
    p.validate();
    ModeBlock b;
    b.lambda = lambda;
    b.matrix = Mat(3, 3);
    b.matrix(0, 1) = -1.0;
    b.matrix(1, 0) = p.c * p.c * lambda;
    b.matrix(1, 1) = p.b * lambda;
    b.matrix(1, 2) = -1.0;
    b.matrix(2, 2) = p.a * lambda;
    return b;
}

std::array<std::complex<double>, 3> mode_eigenvalues(const ModeBlock& block) {
    const double blam = block.matrix(1, 1);
    const double c2lam = block.matrix(1, 0);
    const double alam = block.matrix(2, 2);
    const double disc = blam * blam - 4.0 * c2lam;
    std::array<std::complex<double>, 3> mu;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        mu[0] = {(blam + r) / 2.0, 0.0};
        mu[1] = {(blam - r) / 2.0, 0.0};
    } else {
        const double r = std::sqrt(-disc);
        mu[0] = {blam / 2.0, r / 2.0};
        mu[1] = {blam / 2.0, -r / 2.0};
    }
    mu[2] = {alam, 0.0};
    return mu;
}

// Smallest real part among the per-mode eigenvalues of A at eigenvalue lam.
static double mode_min_real(const PdeParams& p, double lam) {
    const double blam = p.b * lam;
    const double c2lam = p.c * p.c * lam;
    const double alam = p.a * lam;
    const double disc = blam * blam - 4.0 * c2lam;
    double re_small;
    if (disc >= 0.0) {
        // stable form of the small root (b lam - sqrt(disc)) / 2
        re_small = 2.0 * c2lam / (blam + std::sqrt(disc));
    } else {
        re_small = blam / 2.0;
    }
    return std::min(alam, re_small);
}

double lambda_star(const SpectralDomain& dom) {
    auto pairs = dom.eigenpairs();
    for (const auto& [lam, mi] : pairs)
        if (lam > 0.0) return lam;
    throw ConfigError("lambda_star: no positive Laplacian eigenvalue");
}

DecayConstant omega0(const PdeParams& p, const SpectralDomain& dom) {
    p.validate();
    const double ls = lambda_star(dom);
    DecayConstant d;
    d.lambda_star = ls;
    const double heat = p.a * ls;
    const double wave = p.b * ls / 2.0;
    const double acc = p.c * p.c / p.b;
    d.omega0 = std::min({heat, wave, acc});
    if (std::min(heat, wave) <= acc) {
        // attained at the first admissible mode
        for (const auto& [lam, mi] : dom.eigenpairs())
            if (lam > 0.0) {
                d.attaining_mode = mi;
                break;
            }
    }
    return d;
}

double abscissa_over_modes(const PdeParams& p, std::span<const double> lambdas) {
    double m = std::numeric_limits<double>::infinity();
    for (double lam : lambdas) {
        if (lam <= 0.0) throw ConfigError("abscissa_over_modes: eigenvalues must be positive");
        m = std::min(m, mode_min_real(p, lam));
    }
    return -m;
}

SpectralAbscissa spectral_abscissa(const PdeParams& p, const SpectralDomain& dom,
                                   bool exclude_zero_mode) {
    p.validate();
    auto pairs = dom.eigenpairs();
    if (dom.bc() == Bc::neumann && !exclude_zero_mode)
        throw ConfigError(
            "spectral_abscissa: Neumann operator has a zero eigenvalue; "
            "request the mean-zero restriction");

    SpectralAbscissa out;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [lam, mi] : pairs) {
        if (lam == 0.0) continue;
        const double v = mode_min_real(p, lam);
        if (v < best) {
            best = v;
            out.numeric_argmin = mi;
        }
    }
    out.numeric = -best;
    out.analytic = -omega0(p, dom).omega0;
    return out;
}

Mat mode_propagator(const ModeBlock& block, double t) {
    if (t < 0.0) throw ConfigError("mode_propagator: t must be nonnegative");
    const double lam = block.lambda;
    const double blam = block.matrix(1, 1);
    const double c2lam = block.matrix(1, 0);
    const double alam = block.matrix(2, 2);
    const double disc = blam * blam - 4.0 * c2lam;

    // Eigendecomposition route: distinct, comfortably separated real spectrum.
    // M = [[0,-1,0],[c2lam,blam,-1],[0,0,alam]] has eigenvector matrix columns
    // (1, -mu, 0) for the quadratic roots and a third vector solved directly.
    if (lam > 0.0 && disc > 0.0) {
        const double r = std::sqrt(disc);
        const double mu1 = (blam + r) / 2.0;
        const double mu2 = 2.0 * c2lam / (blam + r);
        const double mu3 = alam;
        const double q3 = mu3 * mu3 - blam * mu3 + c2lam; // char. poly of top block at mu3
        if (std::abs(q3) > 1e-8 * (mu3 * mu3 + blam * mu3 + c2lam) && r > 1e-8 * blam) {
            Mat v(3, 3);
            v(0, 0) = 1.0;       v(0, 1) = 1.0;       v(0, 2) = 1.0;
            v(1, 0) = -mu1;      v(1, 1) = -mu2;      v(1, 2) = -mu3;
            v(2, 0) = 0.0;       v(2, 1) = 0.0;       v(2, 2) = q3;
            if (cond_1(v) < 1e8) {
                Mat d(3, 3);
                d(0, 0) = std::exp(-t * mu1);
                d(1, 1) = std::exp(-t * mu2);
                d(2, 2) = std::exp(-t * mu3);
                return v * d * Lu(v).inverse();
            }
        }
    }
    return expm(block.matrix.scaled(-t));
}

} // namespace bcx
