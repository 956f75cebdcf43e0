#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "softboltz/config.hpp"
#include "softboltz/error.hpp"
#include "softboltz/initial.hpp"
#include "softboltz/verify.hpp"

using namespace softboltz;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

int error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

GridPtr grid(int n) { return std::make_shared<const VelocityGrid>(8.0, n); }

} // namespace

TEST(Config, DefaultsAndOverrides) {
    const auto c = parse(
        "# comment\n"
        "kernel.gamma = -0.5   # trailing comment\n"
        "grid.n = 13\n"
        "verify.coarse_n = 11\n"
        "domain.mode = slab1d\n"
        "weight.mode = exploratory\n"
        "initial.family = random-smooth\n"
        "initial.seed = 42\n"
        "initial.center = 0.5, 0, 1\n"
        "verify.m_list = 0.3, 0.2, 0.1\n"
        "solver.collisions = false\n");
    EXPECT_EQ(c.kernel.gamma, -0.5);
    EXPECT_EQ(c.n, 13);
    EXPECT_EQ(c.domain_mode, DomainMode::slab1d);
    EXPECT_EQ(c.weight.mode, WeightMode::exploratory);
    EXPECT_EQ(c.active_weight().beta, c.exploratory_beta);
    EXPECT_EQ(c.weight_for(WeightMode::theorem).beta, 37.0);
    EXPECT_EQ(c.initial.seed.value(), 42u);
    EXPECT_EQ(c.initial.center.z, 1.0);
    EXPECT_EQ(c.verify.m_list.size(), 3u);
    EXPECT_FALSE(c.solver.collisions);
    EXPECT_EQ(c.make_domain().cell_count(), static_cast<std::size_t>(c.cells));
    EXPECT_EQ(c.make_grid()->size(), 13u * 13u * 13u);

    const RunConfig d;
    EXPECT_EQ(d.n, 25);
    EXPECT_EQ(d.weight.beta, 37.0);
    EXPECT_NO_THROW(d.validate());
}

TEST(Config, TextRoundTrip) {
    auto c = parse("kernel.b0 = 2.5\ninitial.norm = 0.75\nverify.targets = 0.2, 0.4\noutput.dir = some/where\n");
    const auto again = parse(c.to_text());
    EXPECT_EQ(again.to_text(), c.to_text());
    EXPECT_EQ(again.kernel.b0, 2.5);
    EXPECT_EQ(again.initial.target_norm.value(), 0.75);
    EXPECT_EQ(again.output_dir, std::filesystem::path("some/where"));
    EXPECT_EQ(parse(RunConfig{}.to_text()).to_text(), RunConfig{}.to_text());
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("grid.n = 9\nbogus.key = 1\n"), 2);
    EXPECT_EQ(error_line("grid.n = 9\n\ngrid.n = 11\n"), 3);
    EXPECT_EQ(error_line("grid.n =\n"), 1);
    EXPECT_EQ(error_line("# x\ngrid.n = nine\n"), 2);
    EXPECT_EQ(error_line("grid.n 9\n"), 1);
    EXPECT_EQ(error_line("kernel.gamma = -1.5x\n"), 1);
    EXPECT_EQ(error_line("solver.collisions = maybe\n"), 1);
    // Component invariants are checked after parsing.
    EXPECT_THROW(parse("grid.n = 10\n"), ConfigError);
    EXPECT_THROW(parse("kernel.gamma = -3\n"), ConfigError);
    EXPECT_THROW(parse("weight.beta = 30\n"), ConfigError);
    EXPECT_NO_THROW(parse("weight.beta = 30\nweight.mode = exploratory\n"));
    EXPECT_THROW(parse("verify.m_list = 0.1, 0.2, 0.3\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/softboltz.cfg"), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
    for (const char* name : {"smoke.cfg", "desk.cfg"}) {
        const auto c = load_config(std::filesystem::path(SOFTBOLTZ_CONFIG_DIR) / name);
        EXPECT_NO_THROW(c.validate()) << name;
    }
}

TEST(InitialData, FamiliesAndTargets) {
    const auto g = grid(9);
    const auto hom = SpatialDomain::homogeneous();
    InitialSpec s;
    EXPECT_EQ(make_initial(g, hom, s, 37.0, 4.0).values()[0], 0.0);

    s.family = InitialFamily::random_smooth;
    EXPECT_THROW(make_initial(g, hom, s, 37.0, 4.0), InputError);
    s.seed = 11;
    const auto a = make_initial(g, hom, s, 37.0, 4.0), b = make_initial(g, hom, s, 37.0, 4.0);
    for (std::size_t v = 0; v < g->size(); ++v) EXPECT_EQ(a.at(0, v), b.at(0, v));
    s.seed = 12;
    EXPECT_NE(make_initial(g, hom, s, 37.0, 4.0).at(0, g->origin()), a.at(0, g->origin()));

    s.family = InitialFamily::gaussian_bump;
    s.target_norm = 0.5;
    EXPECT_NEAR(norm_lp_v_linf_x(make_initial(g, hom, s, 6.0, 4.0), 6.0, 4.0), 0.5, 1e-12);
    // Width 1: sqrt(mu) shifted to the centre.
    s.target_norm.reset();
    s.amplitude = 0.3;
    s.center = {};
    const auto bump = make_initial(g, hom, s, 6.0, 4.0);
    for (std::size_t v = 0; v < g->size(); ++v)
        EXPECT_NEAR(bump.at(0, v), 0.3 * std::pow(2.0 * kPi, 0.75) * g->sqrt_maxwellian()[v], 1e-15);

    s.family = InitialFamily::bimodal;
    s.amplitude = 1.5;
    EXPECT_THROW(make_initial(g, hom, s, 6.0, 4.0), InputError);
    s.amplitude = 1.0;
    const auto F = to_distribution(make_initial(g, hom, s, 6.0, 4.0));
    EXPECT_GE(F.min_value(), -1e-15);
    EXPECT_EQ(parse_initial_family("bimodal"), InitialFamily::bimodal);
    EXPECT_THROW(parse_initial_family("tophat"), InputError);
}

TEST(VerifyReport, LineFormatAndSummary) {
    const CriterionResult r{"7", Status::pass, 0.25, 0.5, "contraction"};
    EXPECT_EQ(r.line(), "7 PASS 2.500000e-01 5.000000e-01 contraction");
    VerifyReport rep;
    rep.rows.push_back(r);
    rep.rows.push_back({"5.unweighted", Status::info, 1.0, 0.0, "x"});
    EXPECT_TRUE(rep.passed());
    rep.rows.push_back({"5", Status::fail, 2.0, 1.0, "y"});
    EXPECT_FALSE(rep.passed());
    ASSERT_EQ(rep.failures().size(), 1u);
    EXPECT_EQ(rep.failures()[0], "5");
    EXPECT_EQ(rep.to_text().rfind("# criterion_id status measured bound anchor\n", 0), 0u);
}

TEST(VerifyReport, DeterminismConfig) {
    RunConfig c;
    c.verify.determinism_n = 7;
    const auto d = determinism_config(c);
    EXPECT_EQ(d.n, 7);
    EXPECT_EQ(d.verify.solver_n, 7);
    EXPECT_EQ(d.verify.coarse_n, 5);
    EXPECT_EQ(d.windows, 2);
    EXPECT_NO_THROW(d.validate());
}

TEST(RunVerify, SelectedCriteriaOnly) {
    RunConfig c;
    c.n = 9;
    c.verify.coarse_n = 7;
    VerifyOptions o;
    o.only = {12, 4};
    const auto rep = run_verify(c, o);
    ASSERT_FALSE(rep.rows.empty());
    for (const auto& row : rep.rows) EXPECT_TRUE(row.id.starts_with("4") || row.id.starts_with("12")) << row.id;
    EXPECT_EQ(rep.rows.front().id, "4");
    for (const auto& id : {"4", "12"}) {
        const auto it = std::find_if(rep.rows.begin(), rep.rows.end(), [&](const auto& r) { return r.id == id; });
        ASSERT_NE(it, rep.rows.end());
        EXPECT_EQ(it->status, Status::pass) << it->line();
    }
}
