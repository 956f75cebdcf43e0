#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "softboltz/error.hpp"
#include "softboltz/phase_space.hpp"

using namespace softboltz;

namespace {

Vec3 unit(const Vec3& a) { return (1.0 / norm(a)) * a; }

// Monte Carlo integral of |z|^exponent over the unit cube centred at 0.
double cube_integral(double exponent, int samples) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double s = 0.0;
    for (int k = 0; k < samples; ++k) s += std::pow(norm(Vec3{u(rng), u(rng), u(rng)}), exponent);
    return s / samples;
}

} // namespace

TEST(VelocityGrid, LayoutAndReflection) {
    const VelocityGrid g(8.0, 9);
    EXPECT_DOUBLE_EQ(g.spacing(), 2.0);
    EXPECT_EQ(g.size(), 729u);
    const auto o = g.origin();
    EXPECT_DOUBLE_EQ(norm(g.node(o)), 0.0);
    for (std::size_t idx : {0ul, 17ul, 400ul, 728ul}) {
        const auto [i, j, k] = g.multi_index(idx);
        EXPECT_EQ(g.index(i, j, k), idx);
        const Vec3 r = g.node(g.reflect(idx));
        EXPECT_DOUBLE_EQ(r.x, -g.node(idx).x);
        EXPECT_DOUBLE_EQ(r.z, -g.node(idx).z);
    }
    EXPECT_THROW(VelocityGrid(8.0, 10), InputError);
    EXPECT_THROW(VelocityGrid(-1.0, 9), InputError);
}

TEST(VelocityGrid, MaxwellianMomentsOnLattice) {
    // The trapezoid rule is spectrally accurate for the Gaussian.
    const VelocityGrid g(8.0, 33);
    double mass = 0.0, energy = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        mass += g.cell_volume() * g.maxwellian()[v];
        energy += g.cell_volume() * g.maxwellian()[v] * norm2(g.node(v));
        EXPECT_NEAR(g.sqrt_maxwellian()[v] * g.sqrt_maxwellian()[v], g.maxwellian()[v], 1e-300 + 1e-15 * g.maxwellian()[v]);
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_NEAR(energy, 3.0, 1e-11);
}

TEST(VelocityGrid, TruncationMassErrorShrinksWithExtent) {
    // Fixed h = 0.5; L grows.
    double previous = 1.0;
    for (double L : {2.0, 3.0, 4.0}) {
        const int n = static_cast<int>(2 * L / 0.5) + 1;
        const VelocityGrid g(L, n);
        double mass = 0.0;
        for (double m : g.maxwellian()) mass += g.cell_volume() * m;
        const double err = std::abs(mass - 1.0);
        EXPECT_LT(err, previous);
        previous = err;
    }
}

TEST(SingularCell, ClosedFormAndLimits) {
    EXPECT_NEAR(singular_cell_weight(-1.0, 1.0), 2.418, 1e-3);
    EXPECT_NEAR(singular_cell_weight(-1e-9, 1.0), 1.0, 1e-8);
    EXPECT_GT(singular_cell_weight(-2.5, 0.5), 0.0);
    EXPECT_THROW(singular_cell_weight(-3.0, 1.0), DivergentIntegralError);
    EXPECT_THROW(singular_cell_weight(-4.0, 1.0), DivergentIntegralError);
    // Scaling: h^{3 + exponent}.
    EXPECT_NEAR(singular_cell_weight(-1.0, 0.5) / singular_cell_weight(-1.0, 1.0), 0.25, 1e-14);
}

TEST(SingularCell, BallMatchesCubeByMonteCarlo) {
    const double mc = cube_integral(-1.0, 400000);
    EXPECT_NEAR(singular_cell_weight(-1.0, 1.0) / mc, 1.0, 0.05);
    // Stronger singularity at h = 0.5: the ball-for-cube error stays bounded.
    const double mc25 = cube_integral(-2.5, 400000) * std::pow(0.5, 0.5);
    EXPECT_NEAR(singular_cell_weight(-2.5, 0.5) / mc25, 1.0, 0.15);
}

TEST(SphereQuadrature, AbsCosAndPolynomials) {
    for (int order : {2, 4, 8, 12}) {
        const SphereQuadrature s(order);
        EXPECT_NEAR(s.integrate([](const Vec3&) { return 1.0; }), 4.0 * kPi, 1e-12);
        for (const Vec3 axis : {Vec3{0, 0, 1}, Vec3{1, 2, 3}, Vec3{-0.3, 0.1, 0.9}})
            EXPECT_NEAR(s.integrate_abs_cos(axis, [](const Vec3&) { return 1.0; }), 2.0 * kPi, 1e-10);
    }
    const SphereQuadrature s(8);
    EXPECT_NEAR(s.integrate([](const Vec3& w) { return w.x * w.x; }), 4.0 * kPi / 3.0, 1e-12);
    EXPECT_NEAR(s.integrate([](const Vec3& w) { return w.x * w.x * w.y * w.y; }), 4.0 * kPi / 15.0, 1e-12);
    EXPECT_NEAR(s.integrate([](const Vec3& w) { return w.x * w.y * w.z; }), 0.0, 1e-13);
}

TEST(GaussLegendre, IntegratesPolynomialsAndGaussian) {
    const auto [x, w] = gauss_legendre(10);
    double s = 0.0, p = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        p += w[k] * std::pow(x[k], 18);
        // int_0^6 e^{-r^2/2} dr via x -> 3 (x + 1)
        const double r = 3.0 * (x[k] + 1.0);
        s += 3.0 * w[k] * std::exp(-0.5 * r * r);
    }
    EXPECT_NEAR(p, 2.0 / 19.0, 1e-14);
    EXPECT_NEAR(s, std::sqrt(kPi / 2.0), 2e-3);
}

TEST(PostCollision, ConservesMomentumAndEnergy) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const Vec3 v{n(rng), n(rng), n(rng)}, u{n(rng), n(rng), n(rng)};
        const Vec3 omega = unit(Vec3{n(rng), n(rng), n(rng)});
        const auto [vp, up] = post_collision(v, u, omega);
        const Vec3 before = v + u, after = vp + up;
        EXPECT_NEAR(before.x, after.x, 1e-12);
        EXPECT_NEAR(before.y, after.y, 1e-12);
        EXPECT_NEAR(before.z, after.z, 1e-12);
        EXPECT_NEAR(norm2(v) + norm2(u), norm2(vp) + norm2(up), 1e-12 * (1.0 + norm2(v) + norm2(u)));
        // Involution with the same omega.
        const auto [v2, u2] = post_collision(vp, up, omega);
        EXPECT_NEAR(norm(v2 - v), 0.0, 1e-12);
        EXPECT_NEAR(norm(u2 - u), 0.0, 1e-12);
    }
    EXPECT_THROW(post_collision({}, {1, 0, 0}, {1, 1, 0}), InputError);
}

TEST(FrameFor, OrthonormalAndReflected) {
    for (const Vec3 axis : {Vec3{0, 0, 1}, Vec3{1, 1, 0}, Vec3{-2, 0.5, 3}}) {
        const auto [e1, e2, pole] = frame_for(axis);
        EXPECT_NEAR(dot(e1, e2), 0.0, 1e-14);
        EXPECT_NEAR(dot(e1, pole), 0.0, 1e-14);
        EXPECT_NEAR(norm(e1), 1.0, 1e-14);
        EXPECT_NEAR(norm(pole - unit(axis)), 0.0, 1e-14);
        const auto [r1, r2, rp] = frame_for(-1.0 * axis);
        EXPECT_NEAR(norm(r1 + e1), 0.0, 1e-14);
        EXPECT_NEAR(norm(rp + pole), 0.0, 1e-14);
    }
}

TEST(SpatialDomain, WrapStencilAndCharacteristics) {
    const auto slab = SpatialDomain::slab1d(2.0, 8);
    EXPECT_EQ(slab.cell_count(), 8u);
    EXPECT_NEAR(slab.volume(), 2.0, 1e-15);
    EXPECT_NEAR(slab.wrap(-0.5), 1.5, 1e-15);
    EXPECT_NEAR(slab.wrap(4.25), 0.25, 1e-15);
    // Stencil at a cell centre is that cell alone; weights always sum to 1.
    const auto at = slab.stencil(slab.cell_center(3));
    double total = 0.0;
    for (int k = 0; k < at.count; ++k) {
        total += at.weight[k];
        if (at.weight[k] > 0.5) {
            EXPECT_EQ(at.cell[k], 3u);
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
    const Vec3 foot = backward_characteristic(slab, {0.1, 0, 0}, {1.0, 0, 0}, 0.3);
    EXPECT_NEAR(foot.x, 1.8, 1e-14);

    const auto torus = SpatialDomain::torus3d(1.0, 4);
    EXPECT_EQ(torus.cell_count(), 64u);
    const auto st = torus.stencil({0.3, 0.6, 0.95});
    total = 0.0;
    for (int k = 0; k < st.count; ++k) total += st.weight[k];
    EXPECT_NEAR(total, 1.0, 1e-14);

    const auto hom = SpatialDomain::homogeneous();
    EXPECT_EQ(hom.cell_count(), 1u);
    EXPECT_EQ(hom.stencil({5, 5, 5}).count, 1);
    EXPECT_EQ(parse_domain_mode("torus3d"), DomainMode::torus3d);
    EXPECT_THROW(parse_domain_mode("sphere"), InputError);
}
