#include <gtest/gtest.h>

#include <cmath>

#include "softboltz/initial.hpp"
#include "softboltz/solver.hpp"

using namespace softboltz;

namespace {

GridPtr grid(int n) { return std::make_shared<const VelocityGrid>(8.0, n); }

const WeightSpec kLoose{0.0, kInfinity, 0.0, WeightMode::exploratory};
const WeightSpec kExploratory{6.0, 4.0, 2.0, WeightMode::exploratory};

PerturbationField smooth_field(const GridPtr& g, std::uint64_t seed, double amplitude) {
    InitialSpec spec;
    spec.family = InitialFamily::random_smooth;
    spec.seed = seed;
    spec.amplitude = amplitude;
    return make_initial(g, SpatialDomain::homogeneous(), spec, 0.0, 4.0);
}

double max_abs(const LatticeField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST(SolverConfig, Validation) {
    EXPECT_NO_THROW(SolverConfig{}.validate());
    SolverConfig c;
    c.substeps = 1;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.picard_tol = 0.0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.picard_max_iters = 1;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.c1 = -1.0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.horizon = 0.0;
    EXPECT_THROW(c.validate(), InputError);
}

TEST(ComputeT1, Formula) {
    const auto g = grid(9);
    PerturbationField f(g, SpatialDomain::homogeneous());
    EXPECT_NEAR(compute_T1(f, 37.0, 4.0, 1.0), 1.0 / 6.0, 1e-15);
    for (double& x : f.values()) x = 1.0;
    EXPECT_NEAR(compute_T1(f, 0.0, kInfinity, 1.0), 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(compute_T1(f, 0.0, kInfinity, 2.0), 1.0 / 24.0, 1e-15);
    EXPECT_THROW(compute_T1(f, 0.0, kInfinity, 0.0), InputError);
}

TEST(LocalSolve, ZeroIsAFixedPoint) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const PerturbationField f0(g, SpatialDomain::homogeneous());
    SolverConfig c;
    c.substeps = 3;
    const auto sol = local_solve(e, f0, c, kExploratory);
    EXPECT_TRUE(sol.trace.converged);
    EXPECT_EQ(sol.trace.iterations, 1);
    EXPECT_EQ(sol.trajectory.size(), 4u);
    for (const auto& s : sol.trajectory.slices) EXPECT_EQ(max_abs(s), 0.0);
    EXPECT_NEAR(sol.length, 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(sol.trajectory.back().time(), sol.length, 1e-15);
}

TEST(LocalSolve, FreeTransportShiftsInSpace) {
    // Collisions off: f(t, x, v) = f0(x - v1 t), with s(x) = 1 + cos(2 pi x) / 2.
    const auto g = grid(9);
    const auto slab = SpatialDomain::slab1d(1.0, 64);
    InitialSpec spec;
    spec.family = InitialFamily::gaussian_bump;
    spec.amplitude = 0.1;
    const auto f0 = make_initial(g, slab, spec, 0.0, kInfinity);
    const CollisionEngine e(g, 8, KernelParams{});
    SolverConfig c;
    c.collisions = false;
    c.substeps = 2;
    const auto sol = local_solve(e, f0, c, kLoose);
    ASSERT_TRUE(sol.trace.converged);
    const auto s = [](double x) { return 1.0 + 0.5 * std::cos(2.0 * kPi * x); };
    const auto& last = sol.trajectory.back();
    const double t = last.time();
    EXPECT_GT(t, 0.0);
    for (std::size_t cell = 0; cell < slab.cell_count(); ++cell) {
        const double x = slab.cell_center(cell).x;
        for (std::size_t v = 0; v < g->size(); ++v) {
            const double expected = f0.at(cell, v) / s(x) * s(x - g->node(v).x * t);
            EXPECT_NEAR(last.at(cell, v), expected, 2e-3 * spec.amplitude);
        }
    }
}

TEST(LocalSolve, HomogeneousWithoutCollisionsIsStationary) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto f0 = smooth_field(g, 3, 0.4);
    SolverConfig c;
    c.collisions = false;
    const auto sol = local_solve(e, f0, c, kExploratory);
    for (const auto& slice : sol.trajectory.slices)
        for (std::size_t v = 0; v < g->size(); ++v) EXPECT_DOUBLE_EQ(slice.at(0, v), f0.at(0, v));
}

TEST(LocalSolve, PicardContractsAndSolvesTheMildForm) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto f0 = smooth_field(g, 7, 0.4);
    SolverConfig c;
    c.picard_tol = 1e-10;
    const auto sol = local_solve(e, f0, c, kExploratory);
    ASSERT_TRUE(sol.trace.converged);
    ASSERT_GE(sol.trace.ratios.size(), 2u);
    EXPECT_LT(sol.trace.max_ratio_from(1), 0.5);
    EXPECT_GT(sol.min_F_ratio, 0.0);
    EXPECT_LT(mild_residual(e, sol.trajectory, f0, c), 1e-8);
    // Mass moves only by the lattice defect of the collision operator.
    const double m0 = defects(to_distribution(f0)).mass + 1.0;
    const double m1 = defects(to_distribution(sol.trajectory.back())).mass + 1.0;
    EXPECT_LT(std::abs(m1 - m0) / m0, 5e-2);
    EXPECT_FALSE(sol.trace.csv().empty());
}

TEST(LocalSolve, IterationCapRaisesDivergence) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    const auto f0 = smooth_field(g, 7, 0.4);
    SolverConfig c;
    c.picard_max_iters = 2;
    c.picard_tol = 1e-14;
    try {
        local_solve(e, f0, c, kExploratory);
        FAIL() << "expected DivergenceError";
    } catch (const DivergenceError& err) {
        EXPECT_EQ(err.trace().iterations, 2);
        EXPECT_FALSE(err.trace().converged);
    }
}

TEST(LocalSolve, RejectsNegativeInitialDistribution) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    PerturbationField f0(g, SpatialDomain::homogeneous());
    f0.at(0, g->origin()) = -2.0 * g->sqrt_maxwellian()[g->origin()];
    EXPECT_THROW(local_solve(e, f0, SolverConfig{}, kExploratory), InputError);
    // Theorem mode refuses an inadmissible weight.
    EXPECT_THROW(local_solve(e, PerturbationField(g, SpatialDomain::homogeneous()), SolverConfig{},
                             WeightSpec{6.0, 4.0, 2.0, WeightMode::theorem}),
                 InputError);
}

TEST(TimeMarch, GluesWindows) {
    const auto g = grid(9);
    const CollisionEngine e(g, 8, KernelParams{});
    SolverConfig c;
    c.substeps = 2;
    const auto zero = time_march(e, PerturbationField(g, SpatialDomain::homogeneous()), 3, c, kExploratory);
    EXPECT_EQ(zero.windows.size(), 3u);
    EXPECT_EQ(zero.trajectory.size(), 7u);
    EXPECT_EQ(zero.entropy.size(), 4u);
    for (double h : zero.entropy) EXPECT_EQ(h, 0.0);
    EXPECT_NEAR(zero.windows[2].t1, 0.5, 1e-14);
    EXPECT_EQ(zero.windows[1].t0, zero.windows[0].t1);
    EXPECT_THROW(time_march(e, PerturbationField(g, SpatialDomain::homogeneous()), 0, c, kExploratory), InputError);
}
