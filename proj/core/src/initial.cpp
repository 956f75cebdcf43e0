#include "softboltz/initial.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "softboltz/error.hpp"
#include "softboltz/norms.hpp"

namespace softboltz {

InitialFamily parse_initial_family(const std::string& s) {
    if (s == "zero") return InitialFamily::zero;
    if (s == "gaussian-bump") return InitialFamily::gaussian_bump;
    if (s == "bimodal") return InitialFamily::bimodal;
    if (s == "random-smooth") return InitialFamily::random_smooth;
    throw InputError("unknown initial family '" + s + "'");
}

std::string to_string(InitialFamily family) {
    switch (family) {
        case InitialFamily::zero: return "zero";
        case InitialFamily::gaussian_bump: return "gaussian-bump";
        case InitialFamily::bimodal: return "bimodal";
        case InitialFamily::random_smooth: return "random-smooth";
    }
    return "zero";
}

namespace {

double spatial_profile(const SpatialDomain& d, std::size_t cell) {
    if (d.mode() == DomainMode::homogeneous) return 1.0;
    return 1.0 + 0.5 * std::cos(2.0 * kPi * d.cell_center(cell).x / d.period());
}

struct Bump {
    double a;
    Vec3 c;
    double s;
};

std::vector<Bump> random_bumps(std::uint64_t seed, double amplitude) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Bump> b(5);
    double total = 0.0;
    for (auto& x : b) {
        x.a = unit(rng);
        x.c = {1.5 * unit(rng), 1.5 * unit(rng), 1.5 * unit(rng)};
        x.s = 0.6 + 0.4 * (unit(rng) + 1.0);
        total += std::abs(x.a);
    }
    for (auto& x : b) x.a *= amplitude / total;
    return b;
}

// Perturbation at unit amplitude (bimodal and random_smooth are linear in A).
void fill(PerturbationField& f, const InitialSpec& spec, double amplitude) {
    const VelocityGrid& g = f.grid();
    const auto sq = g.sqrt_maxwellian();
    std::vector<Bump> bumps;
    if (spec.family == InitialFamily::random_smooth) bumps = random_bumps(*spec.seed, amplitude);
    for (std::size_t c = 0; c < f.cells(); ++c) {
        const double s = spatial_profile(f.domain(), c);
        for (std::size_t v = 0; v < g.size(); ++v) {
            const Vec3& x = g.node(v);
            double val = 0.0;
            switch (spec.family) {
                case InitialFamily::zero: break;
                case InitialFamily::gaussian_bump:
                    val = amplitude * s * std::exp(-norm2(x - spec.center) / (4.0 * spec.width * spec.width));
                    break;
                case InitialFamily::bimodal: {
                    const double mix = 0.5 * (maxwellian(x - spec.center) + maxwellian(x + spec.center));
                    val = amplitude * (mix - sq[v] * sq[v]) / sq[v];
                    break;
                }
                case InitialFamily::random_smooth: {
                    double sum = 0.0;
                    for (const auto& b : bumps) sum += b.a * std::exp(-norm2(x - b.c) / (2.0 * b.s * b.s));
                    val = sq[v] * s * sum;
                    break;
                }
            }
            f.at(c, v) = val;
        }
    }
}

} // namespace

PerturbationField make_initial(GridPtr grid, const SpatialDomain& domain, const InitialSpec& spec, double beta,
                               double p) {
    if (spec.family == InitialFamily::random_smooth && !spec.seed)
        throw InputError("random-smooth initial data needs an explicit seed");
    if (!std::isfinite(spec.amplitude) || spec.amplitude < 0.0) throw InputError("amplitude must be non-negative");
    if (!(spec.width > 0.0)) throw InputError("bump width must be positive");
    PerturbationField f(std::move(grid), domain, 0.0);
    if (spec.family == InitialFamily::zero) return f;

    double amplitude = spec.amplitude;
    if (spec.target_norm) {
        if (!(*spec.target_norm >= 0.0)) throw InputError("target norm must be non-negative");
        fill(f, spec, 1.0);
        const double unit = norm_lp_v_linf_x(f, beta, p);
        if (!(unit > 0.0)) throw InputError("initial family has zero norm");
        amplitude = *spec.target_norm / unit;
    }
    // The spatial profile reaches 3/2, so these two families need 1.5 A <= 1.
    const double reach = domain.mode() == DomainMode::homogeneous ? 1.0 : 1.5;
    if (spec.family == InitialFamily::bimodal && amplitude > 1.0)
        throw InputError("bimodal amplitude above 1 makes F0 negative");
    if (spec.family == InitialFamily::random_smooth && reach * amplitude >= 1.0)
        throw InputError("random-smooth amplitude too large for F0 >= 0");
    fill(f, spec, amplitude);
    return f;
}

} // namespace softboltz
