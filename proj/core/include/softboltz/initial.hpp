#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "softboltz/fields.hpp"

namespace softboltz {

enum class InitialFamily { zero, gaussian_bump, bimodal, random_smooth };
InitialFamily parse_initial_family(const std::string& s);
std::string to_string(InitialFamily family);

/// Named initial perturbations. Every family keeps F0 = mu + sqrt(mu) f0 >= 0.
///  - gaussian_bump: f0 = A s(x) exp(-|v - c|^2 / (4 width^2)); at width 1 this
///    is sqrt(mu) shifted to c, so its tails are no lighter than the sqrt(mu)
///    tails that K generates.
///  - bimodal:       F0 = (1 - A) mu + A (mu(v - c) + mu(v + c)) / 2.
///  - random_smooth: F0 = mu (1 + s(x) sum_k a_k exp(-|v - c_k|^2 / (2 s_k^2)))
///    with five seeded bumps and sum |a_k| <= A < 1.
/// s(x) = 1 + cos(2 pi x1 / period) / 2 (1 in the homogeneous mode) shapes the
/// bump families in space.
struct InitialSpec {
    InitialFamily family = InitialFamily::zero;
    double amplitude = 0.1;
    /// When set, A is rescaled so that ||w_beta f0||_{L^p_v L^inf_x} equals it.
    std::optional<double> target_norm;
    Vec3 center{0.5, 0.0, 0.0};
    double width = 1.0;
    std::optional<std::uint64_t> seed;
};

/// Throws InputError for random_smooth without a seed or for amplitudes that
/// would make F0 negative.
PerturbationField make_initial(GridPtr grid, const SpatialDomain& domain, const InitialSpec& spec, double beta,
                               double p);

} // namespace softboltz
