#include "bcx/problem.hpp"

#include "bcx/errors.hpp"

namespace bcx {

int boundary_component_count(const SpectralDomain& dom) { return dom.dim() == 1 ? 2 : 4; }

BoundaryData BoundaryData::zero(const SpectralDomain& dom) {
    BoundaryData b;
    b.comps.assign(boundary_component_count(dom), TimeSignal(0.0));
    return b;
}

BoundaryData BoundaryData::interval(TimeSignal left, TimeSignal right) {
    BoundaryData b;
    b.comps.push_back(std::move(left));
    b.comps.push_back(std::move(right));
    return b;
}

bool BoundaryData::all_zero_constant() const {
    for (const auto& s : comps)
        if (!s.is_const_zero()) return false;
    return true;
}

double boundary_integral(const SpectralDomain& dom, std::span<const double> comp_values) {
    if (static_cast<int>(comp_values.size()) != boundary_component_count(dom))
        throw ConfigError("boundary_integral: wrong number of components");
    if (dom.dim() == 1) return comp_values[0] + comp_values[1]; // endpoint sum
    const double lx = dom.axis(0).length();
    const double ly = dom.axis(1).length();
    // west, east (length ly), south, north (length lx)
    return ly * (comp_values[0] + comp_values[1]) + lx * (comp_values[2] + comp_values[3]);
}

double boundary_mean(const SpectralDomain& dom, std::span<const double> comp_values) {
    return boundary_integral(dom, comp_values) / dom.boundary_measure();
}

const std::vector<double>& NormSeries::channel(const std::string& name) const {
    if (name == "l2_u") return l2_u;
    if (name == "l2_ut") return l2_ut;
    if (name == "l2_utt") return l2_utt;
    if (name == "h2_u") return h2_u;
    if (name == "h4_u") return h4_u;
    if (name == "mean_u") return mean_u;
    if (name == "guard_min") return guard_min;
    throw ConfigError("NormSeries: unknown channel '" + name + "'");
}

} // namespace bcx
