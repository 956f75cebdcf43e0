#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "softboltz/fields.hpp"
#include "softboltz/initial.hpp"
#include "softboltz/norms.hpp"
#include "softboltz/phase_space.hpp"
#include "softboltz/solver.hpp"

namespace softboltz {

/// Sizes of the verification suite. Defaults are the desk scale.
struct VerifySettings {
    int coarse_n = 17;            // refinement partner of grid.n
    int solver_n = 13;            // velocity grid of the solver criteria
    int fields = 5;               // random fields for the collision invariants
    double field_amplitude = 0.5; // relative bump size of those fields
    int lemma41_fields = 50;
    std::vector<double> m_list{0.4, 0.2, 0.1, 0.05};
    std::vector<double> targets{0.1, 0.5, 1.0};  // ||w f0|| for the local solves
    double march_target = 1.0;    // ||w f0|| (exploratory weight) of the march data
    int determinism_n = 9;        // grid of the two-thread-count rerun
};

/// Everything a run needs. Parsed from `key = value` lines with dotted
/// sections; '#' starts a comment. Unknown keys are errors.
struct RunConfig {
    KernelParams kernel;
    double extent = 8.0;
    int n = 25;
    int sphere_order = 8;

    DomainMode domain_mode = DomainMode::homogeneous;
    int cells = 8;
    double period = 1.0;

    SolverConfig solver;
    int windows = 5;

    /// weight.beta applies in theorem mode, weight.exploratory_beta otherwise.
    WeightSpec weight{37.0, 4.0, 2.0, WeightMode::theorem};
    double exploratory_beta = 6.0;

    InitialSpec initial;
    std::filesystem::path output_dir = "out";
    VerifySettings verify;

    /// Weight spec with the beta of `mode`.
    WeightSpec weight_for(WeightMode mode) const;
    WeightSpec active_weight() const { return weight_for(weight.mode); }

    GridPtr make_grid(int nodes_per_axis) const;
    GridPtr make_grid() const { return make_grid(n); }
    SpatialDomain make_domain() const;

    /// Throws ConfigError on any violated component invariant.
    void validate() const;
    /// Canonical `key = value` listing; parse_config(to_text()) reproduces the config.
    std::string to_text() const;
};

/// Throws ConfigError with the offending line number.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

} // namespace softboltz
