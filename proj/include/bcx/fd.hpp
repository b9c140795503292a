#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bcx {

// Finite-difference weights for the m-th derivative at x0 from arbitrary
// nodes (Fornberg's recursion).  Returns one weight per node.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m);

// m-th derivative at x0 from n equispaced one-sided nodes x0, x0+s, ...
// with one Richardson step (halved spacing).
double fd_deriv_onesided(const std::function<double(double)>& f, double x0, double s, int m,
                         int n_nodes);

} // namespace bcx
