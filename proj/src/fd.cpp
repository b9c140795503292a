#include "bcx/fd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bcx {

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m) {
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

double fd_deriv_onesided(const std::function<double(double)>& f, double x0, double s, int m,
                         int n_nodes) {
    auto at = [&](double h) {
        std::vector<double> nodes(n_nodes);
        for (int i = 0; i < n_nodes; ++i) nodes[i] = x0 + i * h;
        auto w = fd_weights(x0, nodes, m);
        double acc = 0.0;
        for (int i = 0; i < n_nodes; ++i) acc += w[i] * f(nodes[i]);
        return acc;
    };
    const double p = n_nodes - m; // formal order of the one-sided stencil
    const double d1 = at(s);
    const double d2 = at(s / 2.0);
    const double fac = std::pow(2.0, p);
    return (fac * d2 - d1) / (fac - 1.0);
}

} // namespace bcx
