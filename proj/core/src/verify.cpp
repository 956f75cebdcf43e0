#include "softboltz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "softboltz/collision.hpp"
#include "softboltz/error.hpp"
#include "softboltz/initial.hpp"
#include "softboltz/linop.hpp"
#include "softboltz/norms.hpp"
#include "softboltz/solver.hpp"

namespace softboltz {

std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "PASS";
        case Status::fail: return "FAIL";
        case Status::info: return "INFO";
    }
    return "INFO";
}

namespace {

std::string number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

} // namespace

std::string CriterionResult::line() const {
    return id + ' ' + to_string(status) + ' ' + number(measured) + ' ' + number(bound) + ' ' + anchor;
}

bool VerifyReport::passed() const noexcept {
    return std::none_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == Status::fail; });
}

std::vector<std::string> VerifyReport::failures() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (r.status == Status::fail) out.push_back(r.id);
    return out;
}

std::string VerifyReport::to_text() const {
    std::string out = "# criterion_id status measured bound anchor\n";
    for (const auto& r : rows) out += r.line() + '\n';
    return out;
}

std::string VerifyReport::lemma41_csv() const {
    std::ostringstream os;
    os << "field,n,mode,operator,lhs,rhs_core,ratio\n";
    for (const auto& r : lemma41) {
        const auto ratio = [](double l, double rhs) { return rhs > 0.0 ? l / rhs : std::nan(""); };
        os << r.field << ',' << r.n << ',' << r.mode << ",gamma_minus," << number(r.lhs_minus) << ','
           << number(r.rhs_minus) << ',' << number(ratio(r.lhs_minus, r.rhs_minus)) << '\n';
        os << r.field << ',' << r.n << ',' << r.mode << ",gamma_plus," << number(r.lhs_plus) << ','
           << number(r.rhs_plus) << ',' << number(ratio(r.lhs_plus, r.rhs_plus)) << '\n';
    }
    return os.str();
}

RunConfig determinism_config(const RunConfig& config) {
    RunConfig c = config;
    c.n = config.verify.determinism_n;
    c.verify.coarse_n = std::max(3, c.n - 2);
    c.verify.solver_n = c.n;
    c.verify.fields = 2;
    c.verify.lemma41_fields = 2;
    c.verify.targets = {0.5};
    c.windows = 2;
    return c;
}

namespace {

constexpr double kConservationBound = 5e-3;
// Entropy comparisons allow ten times the conservation bound, relative.
constexpr double kEntropyTolerance = 10.0 * kConservationBound;

class Suite {
public:
    Suite(const RunConfig& config, const VerifyOptions& options) : cfg_(config), opt_(options) {}

    VerifyReport run();

private:
    bool wanted(int id) const { return opt_.only.empty() || opt_.only.count(id) > 0; }
    void log(const std::string& msg) const {
        if (opt_.log) *opt_.log << "[verify] " << msg << std::endl;
    }
    void add(std::string id, Status s, double measured, double bound, std::string anchor) {
        report_.rows.push_back({std::move(id), s, measured, bound, std::move(anchor)});
    }
    static Status gate(bool ok) { return ok ? Status::pass : Status::fail; }

    const CollisionEngine& engine(int n) {
        auto& slot = engines_[n];
        if (!slot) slot = std::make_unique<CollisionEngine>(cfg_.make_grid(n), cfg_.sphere_order, cfg_.kernel, opt_.threads);
        return *slot;
    }
    PerturbationField random_field(int n, int seed, double amplitude) const {
        InitialSpec spec;
        spec.family = InitialFamily::random_smooth;
        spec.seed = static_cast<std::uint64_t>(seed);
        spec.amplitude = amplitude;
        return make_initial(cfg_.make_grid(n), SpatialDomain::homogeneous(), spec, 0.0, cfg_.weight.p);
    }

    void collision_invariants();
    void detailed_balance();
    void null_space();
    void km_scaling_check();
    void kernel_decay();
    void local_solves();
    void march();
    void entropy_gap();
    void product_estimates();
    void exponent_check();
    void determinism();

    struct Run {
        std::string label;
        PerturbationField f0;
        Trajectory trajectory;
    };

    const RunConfig& cfg_;
    VerifyOptions opt_;
    VerifyReport report_;
    std::map<int, std::unique_ptr<CollisionEngine>> engines_;
    std::vector<Run> runs_;        // accepted solves, for the entropy gap
    double min_F_ratio_ = kInfinity;
    bool solver_failed_ = false;
};

// max over phi in {1, v_i, |v|^2} of |sum h^3 Q phi| / ||Q+||_1.
double invariant_ratio(const CollisionEngine& e, const DistributionField& F) {
    const auto gain = q_gain(e, F, F, 0);
    const auto loss = q_loss(e, F, F, 0);
    const VelocityGrid& g = e.grid();
    CompensatedSum l1, moment[5];
    for (std::size_t v = 0; v < g.size(); ++v) {
        const double q = gain[v] - loss[v];
        const Vec3& x = g.node(v);
        l1.add(std::abs(gain[v]));
        moment[0].add(q);
        moment[1].add(q * x.x);
        moment[2].add(q * x.y);
        moment[3].add(q * x.z);
        moment[4].add(q * norm2(x));
    }
    double worst = 0.0;
    for (const auto& m : moment) worst = std::max(worst, std::abs(m.value()));
    return worst / l1.value();
}

void Suite::collision_invariants() {
    std::map<int, double> worst;
    for (const int n : {cfg_.verify.coarse_n, cfg_.n}) {
        const auto& e = engine(n);
        for (int k = 1; k <= cfg_.verify.fields; ++k) {
            log("collision invariants: n=" + std::to_string(n) + " field " + std::to_string(k));
            const auto F = to_distribution(random_field(n, k, cfg_.verify.field_amplitude));
            worst[n] = std::max(worst[n], invariant_ratio(e, F));
        }
    }
    const double fine = worst[cfg_.n], coarse = worst[cfg_.verify.coarse_n];
    add("1", gate(fine <= kConservationBound && fine < coarse), fine, kConservationBound, "collision-invariants");
    add("1.coarse", Status::info, coarse, kConservationBound, "collision-invariants-coarse-grid");
}

void Suite::detailed_balance() {
    const auto& e = engine(cfg_.n);
    log("detailed balance: n=" + std::to_string(cfg_.n));
    const auto M = DistributionField::maxwellian(e.grid_ptr(), SpatialDomain::homogeneous());
    const auto gain = q_gain(e, M, M, 0);
    const auto loss = q_loss(e, M, M, 0);
    double num = 0.0, den = 0.0;
    for (std::size_t v = 0; v < gain.size(); ++v) {
        num = std::max(num, std::abs(gain[v] - loss[v]));
        den = std::max(den, gain[v]);
    }
    const double ratio = num / den;
    add("2", gate(ratio <= 1e-3), ratio, 1e-3, "detailed-balance");
}

void Suite::null_space() {
    std::map<int, double> err;
    for (const int n : {cfg_.verify.coarse_n, cfg_.n}) {
        const auto& e = engine(n);
        log("null space: n=" + std::to_string(n));
        const VelocityGrid& g = e.grid();
        PerturbationField f(e.grid_ptr(), SpatialDomain::homogeneous());
        const auto sq = g.sqrt_maxwellian();
        std::copy(sq.begin(), sq.end(), f.cell(0).begin());
        const auto k = apply_K(e, f, 0);
        std::map<double, double> nu;  // by |v|^2, exact on the lattice
        double num = 0.0, den = 0.0;
        for (std::size_t v = 0; v < g.size(); ++v) {
            const double r2 = norm2(g.node(v));
            if (std::sqrt(r2) > 0.5 * g.extent() + 1e-12) continue;
            auto it = nu.find(r2);
            if (it == nu.end()) it = nu.emplace(r2, maxwellian_frequency(std::sqrt(r2), cfg_.kernel)).first;
            const double ref = it->second * sq[v];
            num = std::max(num, std::abs(k[v] - ref));
            den = std::max(den, ref);
        }
        err[n] = num / den;
    }
    const double fine = err[cfg_.n], coarse = err[cfg_.verify.coarse_n];
    add("3", gate(fine <= 5e-2 && fine < coarse), fine, 5e-2, "null-space-identity");
    add("3.coarse", Status::info, coarse, 5e-2, "null-space-identity-coarse-grid");
}

void Suite::km_scaling_check() {
    log("K^m scaling");
    const auto fit = km_scaling(cfg_.kernel, cfg_.weight.p, cfg_.verify.m_list);
    add("4", gate(fit.within(0.2)), fit.slope, fit.target, "Km-pointwise-scaling");
    const auto fixed = km_scaling(cfg_.kernel, cfg_.weight.p, cfg_.verify.m_list, ScalingFamily::fixed);
    add("4.fixed-profile", Status::info, fixed.slope, 3.0 + cfg_.kernel.gamma, "Km-scaling-fixed-profile");
}

void Suite::kernel_decay() {
    const auto& e = engine(cfg_.n);
    const double speed = 0.5 * cfg_.extent;
    const auto spread = [&](double beta) {
        const auto k = verify_k_bounds(e, beta, speed);
        const auto l = verify_l_bounds(e, beta, cfg_.kernel.m_cutoff, speed);
        const bool finite = std::isfinite(k.decay_max()) && std::isfinite(l.decay_max());
        return finite ? std::max(k.decay_spread(), l.decay_spread()) : kInfinity;
    };
    const WeightSpec active = cfg_.active_weight();
    log("kernel decay: beta=" + number(active.beta));
    const double s = spread(active.beta);
    add("5", gate(s < 3.0), s, 3.0, "kernel-bound-decay");
    add("5.unweighted", Status::info, spread(0.0), 3.0, "kernel-bound-decay-beta-0");
}

void Suite::local_solves() {
    const auto grid = cfg_.make_grid(cfg_.verify.solver_n);
    const auto& e = engine(cfg_.verify.solver_n);
    double bound_ratio = 0.0, max_ratio = 0.0;
    int max_iters = 0;
    bool all_converged = true;
    for (const WeightMode mode : {WeightMode::theorem, WeightMode::exploratory}) {
        const WeightSpec spec = cfg_.weight_for(mode);
        for (const double target : cfg_.verify.targets) {
            log("local solve: " + to_string(mode) + " target " + number(target));
            InitialSpec init;
            init.family = InitialFamily::gaussian_bump;
            init.target_norm = target;
            init.center = cfg_.initial.center;
            init.width = cfg_.initial.width;
            auto f0 = make_initial(grid, SpatialDomain::homogeneous(), init, spec.beta, spec.p);
            try {
                auto sol = local_solve(e, f0, cfg_.solver, spec);
                const double ratio = norm_lp_v_linf_window(sol.trajectory, spec.beta, spec.p) /
                                     (2.0 * norm_lp_v_linf_x(f0, spec.beta, spec.p));
                bound_ratio = std::max(bound_ratio, ratio);
                max_ratio = std::max(max_ratio, sol.trace.max_ratio_from(0));
                max_iters = std::max(max_iters, sol.trace.iterations);
                min_F_ratio_ = std::min(min_F_ratio_, sol.min_F_ratio);
                runs_.push_back({to_string(mode) + "/" + number(target), std::move(f0), std::move(sol.trajectory)});
            } catch (const DivergenceError& err) {
                log(std::string("  diverged: ") + err.what());
                all_converged = false;
                bound_ratio = kInfinity;
                max_ratio = std::max(max_ratio, err.trace().max_ratio_from(0));
                max_iters = std::max(max_iters, err.trace().iterations);
            } catch (const PositivityError& err) {
                log(std::string("  positivity: ") + err.what());
                solver_failed_ = true;
                all_converged = false;
                bound_ratio = kInfinity;
                min_F_ratio_ = -kInfinity;
            }
        }
    }
    add("6", gate(bound_ratio <= 1.1), bound_ratio, 1.1, "local-existence-bound");
    add("7", gate(all_converged && max_ratio <= 0.9 && max_iters <= 20), max_ratio, 0.9, "picard-contraction");
    add("7.iterations", Status::info, max_iters, 20, "picard-iterations");
}

void Suite::march() {
    const auto grid = cfg_.make_grid(cfg_.verify.solver_n);
    const auto& e = engine(cfg_.verify.solver_n);
    const WeightSpec spec = cfg_.weight_for(WeightMode::exploratory);
    InitialSpec init;
    init.family = InitialFamily::gaussian_bump;
    init.target_norm = cfg_.verify.march_target;
    init.center = cfg_.initial.center;
    init.width = cfg_.initial.width;
    auto f0 = make_initial(grid, SpatialDomain::homogeneous(), init, spec.beta, spec.p);
    log("march: " + std::to_string(cfg_.windows) + " windows");
    try {
        auto m = time_march(e, f0, cfg_.windows, cfg_.solver, spec);
        const double e0 = m.entropy.front();
        const double rel = e0 > 0.0 ? m.max_entropy_increase() / e0 : (m.max_entropy_increase() > 0.0 ? kInfinity : 0.0);
        add("9", gate(rel <= kEntropyTolerance), rel, kEntropyTolerance, "entropy-inequality");
        for (const auto& w : m.windows) min_F_ratio_ = std::min(min_F_ratio_, w.min_F_ratio);
        runs_.push_back({"march", std::move(f0), std::move(m.trajectory)});
    } catch (const PositivityError& err) {
        log(std::string("  positivity: ") + err.what());
        solver_failed_ = true;
        min_F_ratio_ = -kInfinity;
        add("9", Status::fail, kInfinity, kEntropyTolerance, "entropy-inequality");
    } catch (const DivergenceError& err) {
        log(std::string("  diverged: ") + err.what());
        add("9", Status::fail, kInfinity, kEntropyTolerance, "entropy-inequality");
    }
}

void Suite::entropy_gap() {
    double worst = 0.0;
    bool ok = !runs_.empty();
    for (const auto& run : runs_) {
        const auto F0 = to_distribution(run.f0);
        for (const auto& slice : run.trajectory.slices) {
            const auto gap = lemma24_gap(to_distribution(slice), F0);
            if (gap.rhs > 0.0) {
                worst = std::max(worst, gap.lhs / gap.rhs);
                ok = ok && gap.lhs <= gap.rhs * (1.0 + kEntropyTolerance);
            } else if (gap.lhs > 0.0) {
                worst = kInfinity;
                ok = false;
            }
        }
    }
    add("10", gate(ok), worst, 1.0 + kEntropyTolerance, "entropy-gap-bound");
}

void Suite::product_estimates() {
    const std::vector<WeightSpec> specs{cfg_.weight_for(WeightMode::theorem), cfg_.weight_for(WeightMode::exploratory)};
    // [spec][operator] -> n -> max ratio
    std::map<std::pair<std::size_t, int>, std::map<int, double>> worst;
    for (const int n : {cfg_.verify.coarse_n, cfg_.n}) {
        const auto& e = engine(n);
        for (int k = 1; k <= cfg_.verify.lemma41_fields; ++k) {
            if (k == 1 || k % 10 == 0)
                log("product estimates: n=" + std::to_string(n) + " field " + std::to_string(k));
            Trajectory t;
            t.slices.push_back(random_field(n, k, cfg_.verify.field_amplitude));
            const auto reps = lemma41_check(e, t, specs, 0.0, 0.0);
            for (std::size_t s = 0; s < specs.size(); ++s) {
                const auto& r = reps[s];
                report_.lemma41.push_back(
                    {k, n, to_string(specs[s].mode), r.lhs_minus, r.rhs_minus, r.lhs_plus, r.rhs_plus});
                for (int op = 0; op < 2; ++op) {
                    const double ratio = op == 0 ? r.ratio_minus() : r.ratio_plus();
                    if (std::isnan(ratio)) continue;
                    auto& slot = worst[{s, op}][n];
                    slot = std::max(slot, ratio);
                }
            }
        }
    }
    double change = 0.0;
    for (const auto& [key, by_n] : worst) {
        const double coarse = by_n.count(cfg_.verify.coarse_n) ? by_n.at(cfg_.verify.coarse_n) : 0.0;
        const double fine = by_n.count(cfg_.n) ? by_n.at(cfg_.n) : 0.0;
        const double c = coarse > 0.0 ? std::abs(fine / coarse - 1.0) : kInfinity;
        change = std::max(change, c);
        const std::string label = to_string(specs[key.first].mode) + (key.second == 0 ? ".minus" : ".plus");
        add("11." + label, Status::info, fine, coarse, "product-estimate-ratio-fine-vs-coarse");
    }
    add("11", gate(change < 0.5), change, 0.5, "product-estimate-stability");
}

void Suite::exponent_check() {
    const auto ex = exponent_identities(cfg_.weight.p, cfg_.weight.q);
    const double err = std::max(std::abs(ex.minus_sum - 2.0), std::abs(ex.plus_sum_rp - 2.0));
    add("12", gate(err <= 1e-14), err, 1e-14, "exponent-identities");
    add("12.r-over-q", Status::info, ex.plus_sum_rq, 2.0, "exponent-sum-with-r-over-q");
}

void Suite::determinism() {
    const RunConfig small = determinism_config(cfg_);
    std::string text[2];
    const int threads[2] = {1, 8};
    for (int i = 0; i < 2; ++i) {
        log("determinism: threads " + std::to_string(threads[i]));
        VerifyOptions o;
        o.threads = threads[i];
        for (int id = 1; id <= 12; ++id) o.only.insert(id);
        text[i] = run_verify(small, o).to_text();
    }
    std::istringstream a(text[0]), b(text[1]);
    std::string la, lb;
    int differing = 0;
    while (true) {
        const bool ga = static_cast<bool>(std::getline(a, la));
        const bool gb = static_cast<bool>(std::getline(b, lb));
        if (!ga && !gb) break;
        if (ga != gb || la != lb) ++differing;
    }
    add("13", gate(differing == 0), differing, 0.0, "determinism");
}

VerifyReport Suite::run() {
    if (wanted(1)) collision_invariants();
    if (wanted(2)) detailed_balance();
    if (wanted(3)) null_space();
    if (wanted(4)) km_scaling_check();
    if (wanted(5)) kernel_decay();
    const bool solves = wanted(6) || wanted(7) || wanted(8) || wanted(10);
    if (solves) local_solves();
    if (wanted(9) || wanted(8) || wanted(10)) march();
    if (wanted(8)) {
        const double bound = -cfg_.solver.positivity_tol;
        add("8", gate(!solver_failed_ && min_F_ratio_ >= bound), min_F_ratio_, bound, "positivity");
    }
    if (wanted(10)) entropy_gap();
    if (wanted(11)) product_estimates();
    if (wanted(12)) exponent_check();
    if (wanted(13)) determinism();

    // Rows in criterion order regardless of evaluation order.
    const auto key = [](const CriterionResult& r) {
        const auto dot = r.id.find('.');
        return std::make_pair(std::stoi(r.id.substr(0, dot)), dot == std::string::npos ? 0 : 1);
    };
    std::stable_sort(report_.rows.begin(), report_.rows.end(),
                     [&](const auto& x, const auto& y) { return key(x) < key(y); });
    // Drop rows of criteria that only ran as a dependency.
    std::erase_if(report_.rows, [&](const auto& r) { return !wanted(key(r).first); });
    return std::move(report_);
}

} // namespace

VerifyReport run_verify(const RunConfig& config, const VerifyOptions& options) {
    config.validate();
    return Suite(config, options).run();
}

} // namespace softboltz
