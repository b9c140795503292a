#pragma once

#include "bcx/domain.hpp"
#include "bcx/smallmat.hpp"

#include <array>
#include <complex>
#include <optional>

namespace bcx {

// Physical constants of the Blackstock-Crighton model:
//   (a Delta - d/dt)(u_tt - b Delta u_t - c^2 Delta u) = (k u_t^2 + s |grad u|^2)_tt
// s = 1 selects the Kuznetsov variant, s = 0 the Westervelt variant.  When
// B/A is given, k is derived from it per variant.
struct PdeParams {
    double a = 1.0; // heat conductivity
    double b = 1.0; // sound diffusivity
    double c = 1.0; // sound speed
    double k = 0.0; // nonlinearity coefficient
    int s = 1;      // local nonlinearity switch

    static PdeParams from_b_over_a(double a, double b, double c, double b_over_a, int s);
    void validate() const;
};

// 3x3 restriction of the evolution operator to a Laplacian eigenspace:
// substituting Delta -> -lambda gives
//   [[0, -1, 0], [c^2 lam, b lam, -1], [0, 0, a lam]].
// Eigenvalues are {a lam} together with the roots of mu^2 - b lam mu + c^2 lam.
struct ModeBlock {
    double lambda = 0.0;
    Mat matrix; // 3x3
};

ModeBlock mode_matrix(double lambda, const PdeParams& p);

std::array<std::complex<double>, 3> mode_eigenvalues(const ModeBlock& block);

// Decay constant omega0 = min{a lam*, b lam*/2, c^2/b} with lam* the smallest
// admissible eigenvalue (first Dirichlet eigenvalue, or first nonzero Neumann
// eigenvalue on the mean-zero subspace).  The c^2/b branch is the
// accumulation value of the small root mu_-(lam) as lam -> infinity and is
// not attained at any finite mode.
struct DecayConstant {
    double omega0 = 0.0;
    std::optional<ModeIndex> attaining_mode; // empty: accumulation at infinity
    double lambda_star = 0.0;
};

DecayConstant omega0(const PdeParams& p, const SpectralDomain& dom);

// Spectral abscissa of -A over the retained modes (numeric) and its analytic
// limit -omega0 (including the c^2/b accumulation point).  For Neumann
// domains the zero mode must be excluded (operator restricted to the
// mean-zero subspace), otherwise the bound degenerates to 0.
struct SpectralAbscissa {
    double numeric = 0.0;
    double analytic = 0.0;
    ModeIndex numeric_argmin;
};

SpectralAbscissa spectral_abscissa(const PdeParams& p, const SpectralDomain& dom,
                                   bool exclude_zero_mode = false);

// Convenience: abscissa over an explicit eigenvalue list (all lambda >= 0;
// zero eigenvalues rejected).
double abscissa_over_modes(const PdeParams& p, std::span<const double> lambdas);

// Real matrix exponential exp(-t M) of a mode block.  Eigendecomposition
// when the eigenvector conditioning allows it, scaling-and-squaring
// otherwise (defective lambda = 0 block, near-critical damping).
Mat mode_propagator(const ModeBlock& block, double t);

// Smallest admissible Laplacian eigenvalue of the domain.
double lambda_star(const SpectralDomain& dom);

} // namespace bcx
