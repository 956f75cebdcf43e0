#include <gtest/gtest.h>

#include <cmath>

#include "softboltz/collision.hpp"
#include "softboltz/error.hpp"
#include "softboltz/initial.hpp"
#include "softboltz/linop.hpp"

using namespace softboltz;

namespace {

GridPtr grid(int n) { return std::make_shared<const VelocityGrid>(8.0, n); }

PerturbationField smooth_field(const GridPtr& g, std::uint64_t seed, double amplitude) {
    InitialSpec spec;
    spec.family = InitialFamily::random_smooth;
    spec.seed = seed;
    spec.amplitude = amplitude;
    return make_initial(g, SpatialDomain::homogeneous(), spec, 0.0, 4.0);
}

// nu(0) = b0 2 pi (2 pi)^{-3/2} 4 pi int_0^inf r^{2+gamma} e^{-r^2/2} dr, the radial integral by Gamma.
double nu_origin(double gamma) {
    const double s = 2.0 + gamma;
    const double radial = std::pow(2.0, 0.5 * (s - 1.0)) * std::tgamma(0.5 * (s + 1.0));
    return 2.0 * kPi * std::pow(2.0 * kPi, -1.5) * 4.0 * kPi * radial;
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST(CollisionKernel, UnitCases) {
    const KernelParams p;
    EXPECT_DOUBLE_EQ(collision_kernel({1, 0, 0}, {0, 0, 0}, {1, 0, 0}, p), 1.0);
    EXPECT_NEAR(collision_kernel({1, 0, 0}, {0, 0, 0}, {0, 1, 0}, p), 0.0, 1e-15);
    const double c = 0.5, s = std::sqrt(0.75);
    EXPECT_NEAR(collision_kernel({2, 0, 0}, {0, 0, 0}, {c, s, 0}, p), 0.25, 1e-15);
    EXPECT_THROW(collision_kernel({1, 1, 1}, {1, 1, 1}, {1, 0, 0}, p), InputError);
    KernelParams bad;
    bad.gamma = -3.0;
    EXPECT_THROW(bad.validate(), InputError);
}

TEST(ScatteringRule, WeightsAndEvenMoments) {
    const ScatteringRule rule(8);
    EXPECT_EQ(rule.size(), 30u);
    EXPECT_NEAR(rule.total(), 2.0 * kPi, 1e-13);
    // int |cos| cos^2 over S^2 = pi; int |cos| sin^2 cos^2(phi) = pi / 2.
    double c2 = 0.0, s2 = 0.0;
    for (const auto& n : rule.nodes()) {
        c2 += n.weight * n.cos_theta * n.cos_theta;
        s2 += n.weight * (1.0 - n.cos_theta * n.cos_theta) * std::cos(n.azimuth) * std::cos(n.azimuth);
    }
    EXPECT_NEAR(c2, kPi, 1e-13);
    EXPECT_NEAR(s2, kPi / 2.0, 1e-13);
}

TEST(CollisionFrequency, OriginAgainstRadialOracle) {
    EXPECT_NEAR(nu_origin(-1.0), 5.0133, 1e-4);
    const KernelParams p;
    const SphereQuadrature sphere(8);
    const double coarse = std::abs(collision_frequency({}, *grid(17), sphere, p) / nu_origin(-1.0) - 1.0);
    const double fine = std::abs(collision_frequency({}, *grid(33), sphere, p) / nu_origin(-1.0) - 1.0);
    EXPECT_LT(fine, 0.03);
    EXPECT_LT(fine, coarse);
}

TEST(CollisionFrequency, ContinuumReference) {
    const KernelParams p;
    for (double v : {0.3, 1.0, 2.5, 6.0})
        EXPECT_NEAR(maxwellian_frequency(v, p), 2.0 * kPi * std::erf(v / std::sqrt(2.0)) / v, 1e-10);
    EXPECT_NEAR(maxwellian_frequency(0.0, p), nu_origin(-1.0), 1e-10);
    KernelParams q;
    q.gamma = -0.5;
    q.b0 = 2.0;
    EXPECT_NEAR(maxwellian_frequency(0.0, q), 2.0 * nu_origin(-0.5), 1e-9);
    // nu ~ (1 + |v|)^gamma: decreasing for gamma < 0.
    EXPECT_GT(maxwellian_frequency(1.0, q), maxwellian_frequency(4.0, q));
}

TEST(CollisionEngine, LatticeFrequencyMatchesLossSum) {
    const auto g = grid(11);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto nu = e.loss_sum(g->maxwellian());
    for (std::size_t v = 0; v < g->size(); ++v) EXPECT_DOUBLE_EQ(nu[v], e.frequency()[v]);
    EXPECT_NEAR(e.angular_mass(), 2.0 * kPi, 1e-12);
}

TEST(CollisionEngine, MaxwellianIsEquilibriumNodeByNode) {
    const auto g = grid(11);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto M = DistributionField::maxwellian(g, SpatialDomain::homogeneous());
    const auto gain = q_gain(e, M, M, 0);
    const auto loss = q_loss(e, M, M, 0);
    double worst = 0.0;
    for (std::size_t v = 0; v < gain.size(); ++v) worst = std::max(worst, std::abs(gain[v] - loss[v]));
    EXPECT_LT(worst / max_abs(gain), 1e-12);
    // Plain interpolation of F breaks this at O(h^2).
    const auto plain = q_gain(e, M, M, 0, Interpolation::plain);
    double plain_worst = 0.0;
    for (std::size_t v = 0; v < gain.size(); ++v) plain_worst = std::max(plain_worst, std::abs(plain[v] - loss[v]));
    EXPECT_GT(plain_worst / max_abs(gain), 1e-6);
}

TEST(CollisionEngine, SweepAgreesWithDirectSummation) {
    const auto g = grid(11);
    const CollisionEngine e(g, 8, KernelParams{}, 2);
    const auto F = to_distribution(smooth_field(g, 3, 0.6));
    const auto gain = q_gain(e, F, F, 0);
    const auto loss = q_loss(e, F, F, 0);
    for (std::size_t v : {g->origin(), std::size_t{0}, std::size_t{17}, g->size() / 3, g->size() - 5}) {
        EXPECT_NEAR(gain[v], q_gain_at(e, F, F, 0, v), 1e-12 * max_abs(gain));
        EXPECT_NEAR(loss[v], q_loss_at(e, F, F, 0, v), 1e-12 * max_abs(loss));
    }
}

TEST(CollisionEngine, ThreadCountDoesNotChangeBits) {
    const auto g = grid(9);
    const auto F = to_distribution(smooth_field(g, 5, 0.5));
    const CollisionEngine one(g, 8, KernelParams{}, 1);
    const CollisionEngine many(g, 8, KernelParams{}, 5);
    const auto a = q_gain(one, F, F, 0), b = q_gain(many, F, F, 0);
    for (std::size_t v = 0; v < a.size(); ++v) EXPECT_EQ(a[v], b[v]);
}

TEST(CollisionEngine, InvariantsImproveUnderRefinement) {
    double ratio[2];
    int k = 0;
    for (int n : {11, 17}) {
        const auto g = grid(n);
        const CollisionEngine e(g, 8, KernelParams{});
        const auto F = to_distribution(smooth_field(g, 1, 0.5));
        const auto gain = q_gain(e, F, F, 0), loss = q_loss(e, F, F, 0);
        double l1 = 0.0, mass = 0.0, energy = 0.0;
        for (std::size_t v = 0; v < g->size(); ++v) {
            l1 += std::abs(gain[v]);
            mass += gain[v] - loss[v];
            energy += (gain[v] - loss[v]) * norm2(g->node(v));
        }
        ratio[k++] = std::max(std::abs(mass), std::abs(energy)) / l1;
    }
    EXPECT_LT(ratio[1], ratio[0]);
    EXPECT_LT(ratio[1], 5e-2);
}

TEST(Gamma, ZeroFieldAndPointwiseAgreement) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const PerturbationField zero(g, SpatialDomain::homogeneous());
    EXPECT_EQ(max_abs(gamma_plus(e, zero, 0)), 0.0);
    EXPECT_EQ(max_abs(gamma_minus(e, zero, 0)), 0.0);
    const auto gz = g_field(e, zero, 0);
    for (std::size_t v = 0; v < g->size(); ++v) EXPECT_DOUBLE_EQ(gz[v], e.frequency()[v]);

    const auto f = smooth_field(g, 9, 0.4);
    const auto gp = gamma_plus(e, f, 0), gm = gamma_minus(e, f, 0), gf = g_field(e, f, 0);
    for (std::size_t v : {g->origin(), std::size_t{100}, std::size_t{500}}) {
        EXPECT_NEAR(gp[v], gamma_plus_at(e, f, 0, v), 1e-12 * max_abs(gp));
        EXPECT_NEAR(gm[v], gamma_minus_at(e, f, 0, v), 1e-12 * max_abs(gm));
        EXPECT_NEAR(gf[v], g_field_at(e, f, 0, v), 1e-12 * max_abs(gf));
    }
}

TEST(Gamma, GainMatchesDistributionForm) {
    // sqrt(mu) Gamma+(f, f) = Q+(sqrt(mu) f, sqrt(mu) f).
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto f = smooth_field(g, 2, 0.4);
    DistributionField G(g, SpatialDomain::homogeneous());
    for (std::size_t v = 0; v < g->size(); ++v) G.at(0, v) = g->sqrt_maxwellian()[v] * f.at(0, v);
    const auto q = q_gain(e, G, G, 0);
    const auto gp = gamma_plus(e, f, 0);
    for (std::size_t v = 0; v < g->size(); ++v) EXPECT_NEAR(g->sqrt_maxwellian()[v] * gp[v], q[v], 1e-12 * max_abs(q));
}

TEST(Gamma, LinearizationOfQ) {
    // Q(mu + eps sqrt(mu) f) / eps = sqrt(mu) (K f - nu f) + O(eps).
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto f = smooth_field(g, 4, 0.9);
    const double eps = 1e-5;
    PerturbationField small(g, SpatialDomain::homogeneous());
    for (std::size_t v = 0; v < g->size(); ++v) small.at(0, v) = eps * f.at(0, v);
    const auto F = to_distribution(small);
    const auto gain = q_gain(e, F, F, 0), loss = q_loss(e, F, F, 0);
    const auto k = apply_K(e, f, 0);
    std::vector<double> lin(g->size()), fd(g->size());
    for (std::size_t v = 0; v < g->size(); ++v) {
        lin[v] = g->sqrt_maxwellian()[v] * (k[v] - e.frequency()[v] * f.at(0, v));
        fd[v] = (gain[v] - loss[v]) / eps;
    }
    const double scale = max_abs(lin);
    for (std::size_t v = 0; v < g->size(); ++v) EXPECT_NEAR(fd[v], lin[v], 1e-4 * scale);
}
