#pragma once

#include "bcx/nonlinear.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace bcx {

struct DomainSpec {
    std::string kind = "interval"; // interval | rectangle
    Bc bc = Bc::dirichlet;
    double length = 3.141592653589793;
    double lx = 3.141592653589793, ly = 3.141592653589793;
    int n_modes = 128;
    int nx_modes = 64, ny_modes = 64;
};

struct DataSpec {
    std::string preset = "sine"; // zero | sine | cosine | incompatible | neumann-forced
    double amplitude = 1.0;
    int mode = 1;
};

struct SolverSpec {
    std::string kind = "linear"; // linear | nonlinear | picard | direct-modal
    double horizon = 30.0;
    double dt = 1e-3;
    double eps_guard = 0.5;
    bool integrating_factor = true;
    bool cubic_forcing = true;
    int picard_max_iters = 25;
    double picard_tol = 1e-10;
    int state_stride = 0;
};

struct FitSpec {
    double t_begin = 5.0;
    double t_end = 30.0;
    std::string channel = "l2_u";
    double rel_tol = 0.01;
};

struct SweepSpec {
    std::vector<double> a, b, c;
};

struct Scenario {
    std::string name = "scenario";
    PdeParams params;
    std::optional<double> b_over_a;
    DomainSpec domain;
    DataSpec data;
    SolverSpec solver;
    FitSpec fit;
    std::optional<SweepSpec> sweep;
    Fraction p_exponent{2};
    std::uint64_t seed = 0;
};

// Strict JSON parsing: unknown fields are rejected with a field diagnostic.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path_or_preset); // preset names resolve first
std::string serialize_scenario(const Scenario& sc);        // canonical, round-trips losslessly
std::uint64_t scenario_hash(const Scenario& sc);

std::vector<std::string> preset_names();

DomainPtr build_domain(const DomainSpec& spec);
ProblemData build_data(const Scenario& sc, const DomainPtr& dom);
PdeParams effective_params(const Scenario& sc);

// Fixed 17-significant-digit formatting for reproducible CSV bodies.
std::string fmt17(double v);

} // namespace bcx
