#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "softboltz/error.hpp"
#include "softboltz/initial.hpp"
#include "softboltz/linop.hpp"
#include "softboltz/norms.hpp"

using namespace softboltz;

namespace {

GridPtr grid(int n) { return std::make_shared<const VelocityGrid>(8.0, n); }

PerturbationField smooth_field(const GridPtr& g, std::uint64_t seed) {
    InitialSpec spec;
    spec.family = InitialFamily::random_smooth;
    spec.seed = seed;
    spec.amplitude = 0.5;
    return make_initial(g, SpatialDomain::homogeneous(), spec, 0.0, 4.0);
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST(CutoffProfile, ShapeAndFilter) {
    const CutoffProfile chi(0.5);
    EXPECT_EQ(chi(0.0), 1.0);
    EXPECT_EQ(chi(0.5), 1.0);
    EXPECT_EQ(chi(1.0), 0.0);
    EXPECT_EQ(chi(3.0), 0.0);
    EXPECT_NEAR(chi(0.75), 0.5, 1e-14);
    double prev = 1.0;
    for (double t = 0.5; t <= 1.0; t += 0.01) {
        EXPECT_LE(chi(t), prev + 1e-15);
        prev = chi(t);
    }
    EXPECT_THROW(CutoffProfile(0.0), InputError);
    EXPECT_THROW(CutoffProfile(-1.0), InputError);

    // chi and 1 - chi split every radial factor and the coincident cell.
    const auto in = chi.filter(-1.0, 0.4);
    const auto out = chi.filter(-1.0, 0.4, true);
    for (double r : {0.1, 0.6, 0.8, 2.0}) EXPECT_NEAR(in.factor(r) + out.factor(r), 1.0, 1e-15);
    EXPECT_NEAR(in.singular_cell + out.singular_cell, singular_cell_weight(-1.0, 0.4), 1e-10);
}

TEST(ApplyK, SqrtMaxwellianIsEigenvectorOfNu) {
    // phi = 1: K sqrt(mu) = sqrt(mu) (2 nu - nu) away from the box edge, where
    // post-collision velocities leave the lattice.
    const auto g = grid(11);
    const CollisionEngine e(g, 8, KernelParams{});
    PerturbationField f(g, SpatialDomain::homogeneous());
    for (std::size_t v = 0; v < g->size(); ++v) f.at(0, v) = g->sqrt_maxwellian()[v];
    const auto k = apply_K(e, f, 0);
    for (std::size_t v = 0; v < g->size(); ++v) {
        if (norm(g->node(v)) > 0.5 * g->extent()) continue;
        EXPECT_NEAR(k[v], e.frequency()[v] * g->sqrt_maxwellian()[v], 1e-3 * e.frequency()[v] * g->sqrt_maxwellian()[v]);
    }
}

TEST(ApplyK, CutoffSplitIsExact) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto f = smooth_field(g, 6);
    const CutoffProfile chi(1.5);
    const auto k = apply_K(e, f, 0), km = apply_Km(e, f, 0, chi), kc = apply_Kc(e, f, 0, chi);
    const double scale = max_abs(k);
    for (std::size_t v = 0; v < g->size(); ++v) EXPECT_NEAR(km[v] + kc[v], k[v], 1e-12 * scale);
    // K is linear.
    PerturbationField twice(g, SpatialDomain::homogeneous());
    for (std::size_t v = 0; v < g->size(); ++v) twice.at(0, v) = 2.0 * f.at(0, v);
    const auto k2 = apply_K(e, twice, 0);
    for (std::size_t v = 0; v < g->size(); ++v) EXPECT_NEAR(k2[v], 2.0 * k[v], 1e-12 * scale);
    EXPECT_THROW(apply_K(e, f, 1), InputError);
}

TEST(KernelBounds, ClosedFormSymmetryAndSingularity) {
    const KernelParams p;
    EXPECT_NEAR(kernel_k_bound({1, 0, 0}, {0, 0, 0}, p), 2.0 * std::exp(-0.25), 1e-15);
    const Vec3 a{0.3, -1.2, 2.0}, b{-0.7, 0.4, 1.1};
    EXPECT_NEAR(kernel_k_bound(a, b, p), kernel_k_bound(b, a, p), 1e-15);
    EXPECT_NEAR(kernel_l_bound(a, b, p), kernel_l_bound(b, a, p), 1e-15);
    EXPECT_THROW(kernel_k_bound(a, a, p), SingularPointError);
}

TEST(KernelBounds, DecayReportsAreWellFormed) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto k = verify_k_bounds(e, 6.0, 4.0);
    ASSERT_FALSE(k.rows.empty());
    for (const auto& row : k.rows) {
        EXPECT_GT(row.integral, 0.0);
        EXPECT_LE(row.speed, 4.0);
        EXPECT_NEAR(row.decay, (1.0 + row.speed) * row.integral, 1e-12 * row.decay);
    }
    EXPECT_GE(k.decay_spread(), 1.0);
    // m beyond the grid diameter: K^c vanishes.
    EXPECT_TRUE(verify_l_bounds(e, 6.0, 100.0, 4.0).rows.empty());
    EXPECT_EQ(BoundReport{}.decay_spread(), 1.0);
}

TEST(LogLogSlope, RecoversPowerLaw) {
    const std::vector<double> x{0.5, 0.25, 0.125, 0.0625};
    std::vector<double> y;
    for (double t : x) y.push_back(3.0 * std::pow(t, 1.75));
    EXPECT_NEAR(loglog_slope(x, y), 1.75, 1e-13);
    const std::vector<double> bad{1.0, -1.0, 2.0, 3.0};
    EXPECT_THROW(loglog_slope(x, bad), InputError);
    EXPECT_THROW(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), InputError);
}

TEST(KmScaling, RejectsMalformedSweeps) {
    const KernelParams p;
    EXPECT_THROW(km_scaling(p, 4.0, std::vector<double>{0.4, 0.2}), InputError);
    EXPECT_THROW(km_scaling(p, 4.0, std::vector<double>{0.4, 0.4, 0.1}), InputError);
    EXPECT_THROW(km_scaling(p, 4.0, std::vector<double>{2.0, 0.4, 0.1}), InputError);
    EXPECT_THROW(km_scaling(p, 1.0, std::vector<double>{0.4, 0.2, 0.1}), InputError);
}

TEST(KmScaling, SlopeMatchesExponent) {
    // p = inf: f_m = exp(-|u/m|^2), K^m f_m(0) ~ m^{3 + gamma}.
    KernelParams p;
    p.gamma = -0.5;
    const std::vector<double> ms{0.4, 0.2, 0.1, 0.05};
    const auto inf = km_scaling(p, kInfinity, ms);
    EXPECT_NEAR(inf.target, 2.5, 1e-14);
    EXPECT_NEAR(inf.slope, 2.5, 0.05);
    EXPECT_TRUE(inf.within(0.05));
    const auto four = km_scaling(KernelParams{}, 4.0, ms);
    EXPECT_NEAR(four.target, -1.0 + 2.25, 1e-14);
    EXPECT_TRUE(four.within(0.2));
    // Fixed profile tends to 3 + gamma.
    const auto fixed = km_scaling(KernelParams{}, 4.0, ms, ScalingFamily::fixed);
    EXPECT_NEAR(fixed.slope, 2.0, 0.1);
}
