#include "softboltz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace softboltz {

void SolverConfig::validate() const {
    if (!(picard_tol > 0.0)) throw InputError("picard_tol must be positive");
    if (picard_max_iters < 2) throw InputError("picard_max_iters must be at least 2");
    if (!(c1 > 0.0)) throw InputError("C1 must be positive");
    if (substeps < 2) throw InputError("substeps must be at least 2");
    if (!(horizon > 0.0)) throw InputError("horizon must be positive");
    if (!(positivity_tol >= 0.0)) throw InputError("positivity_tol must be non-negative");
}

double IterationTrace::max_ratio_from(std::size_t first) const noexcept {
    double r = 0.0;
    for (std::size_t i = first; i < ratios.size(); ++i) r = std::max(r, ratios[i]);
    return r;
}

std::string IterationTrace::csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "iterate,norm,difference,ratio\n";
    for (std::size_t i = 0; i < differences.size(); ++i) {
        os << i + 1 << ',' << (i < norms.size() ? norms[i] : 0.0) << ',' << differences[i] << ',';
        if (i >= 1 && i - 1 < ratios.size()) os << ratios[i - 1];
        os << '\n';
    }
    return os.str();
}

double compute_T1(const PerturbationField& f0, double beta, double p, double c1) {
    if (!(c1 > 0.0)) throw InputError("C1 must be positive");
    const double n = norm_lp_v_linf_x(f0, beta, p);
    if (!std::isfinite(n)) throw InputError("initial weighted norm is not finite");
    return 1.0 / (6.0 * c1 * (1.0 + n));
}

namespace {

// Exact integrals of e^{-a s} s and e^{-a s}(1 - s) over [0, 1]: the weights
// of the left and right interval values.
double psi_left(double a) {
    if (std::abs(a) < 0.5) {
        double term = 1.0, sum = 0.0;
        for (int k = 0; k < 24; ++k) {
            sum += term / (k + 2);
            term *= -a / (k + 1);
        }
        return sum;
    }
    return (1.0 - std::exp(-a) * (1.0 + a)) / (a * a);
}

double psi_right(double a) {
    if (std::abs(a) < 0.5) {
        double term = 1.0, sum = 0.0;
        for (int k = 0; k < 24; ++k) {
            sum += term / ((k + 1.0) * (k + 2.0));
            term *= -a / (k + 1);
        }
        return sum;
    }
    return (a - 1.0 + std::exp(-a)) / (a * a);
}

bool same_values(const PerturbationField& a, const PerturbationField& b) {
    const auto x = a.values(), y = b.values();
    return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin());
}

} // namespace

PicardMap::PicardMap(const CollisionEngine& engine, PerturbationField f0, SolverConfig config)
    : engine_(&engine), f0_(std::move(f0)), config_(config) {
    config_.validate();
    if (!engine.grid().same_as(f0_.grid())) throw InputError("initial data and engine use different velocity grids");
    if (!f0_.all_finite()) throw InputError("initial data is not finite");
    f0_ops_ = ops_for(f0_);
}

PicardMap::SliceOps PicardMap::ops_for(const PerturbationField& slice) const {
    const std::size_t N = slice.velocities();
    SliceOps ops;
    ops.g.assign(slice.cells() * N, 0.0);
    ops.sigma.assign(slice.cells() * N, 0.0);
    if (!config_.collisions) return ops;
    const auto mu = slice.grid().maxwellian();
    const auto sq = slice.grid().sqrt_maxwellian();
    const auto nu = engine_->frequency();
    for (std::size_t c = 0; c < slice.cells(); ++c) {
        const auto phi = slice.ratio(c);
        const auto gain = engine_->gain_sums(phi, phi, mu, CollisionEngine::kAB | CollisionEngine::kA1);
        std::vector<double> weighted(N);
        for (std::size_t v = 0; v < N; ++v) weighted[v] = mu[v] * phi[v];
        const auto loss = engine_->loss_sum(weighted);
        double gmax = 0.0;
        for (std::size_t v = 0; v < N; ++v) gmax = std::max(gmax, nu[v] + loss[v]);
        for (std::size_t v = 0; v < N; ++v) {
            const double g = nu[v] + loss[v];
            if (!(g > 0.0)) {
                if (g < -config_.positivity_tol * gmax || !std::isfinite(g))
                    throw PositivityError("loss rate g is negative at a velocity node");
                continue;  // g = 0 to roundoff: no decay and no source
            }
            // K f + Gamma+(f, f) = sqrt(mu) (2 G[phi,1] - L[mu phi] + G[phi,phi]).
            const double source = sq[v] * (2.0 * gain.a1[v] - loss[v] + gain.ab[v]);
            ops.g[c * N + v] = g;
            ops.sigma[c * N + v] = source / g;
        }
    }
    return ops;
}

Trajectory PicardMap::zero(const std::vector<double>& times) const {
    Trajectory t;
    for (double s : times) t.slices.emplace_back(f0_.grid_ptr(), f0_.domain(), s);
    return t;
}

Trajectory PicardMap::apply(const Trajectory& fn) const {
    if (fn.empty()) throw InputError("Picard map needs a non-empty trajectory");
    const std::size_t S = fn.size();
    std::vector<SliceOps> ops;
    ops.reserve(S);
    for (const auto& s : fn.slices) {
        s.require_compatible(f0_);
        ops.push_back(same_values(s, f0_) ? f0_ops_ : ops_for(s));
    }
    const SpatialDomain& dom = f0_.domain();
    const VelocityGrid& grid = f0_.grid();
    const std::size_t N = grid.size();
    const auto times = fn.times();
    const double t_start = times.front();

    Trajectory out;
    std::vector<double> gj(S), sj(S);
    for (std::size_t i = 0; i < S; ++i) {
        PerturbationField slice(f0_.grid_ptr(), dom, times[i]);
        for (std::size_t c = 0; c < dom.cell_count(); ++c) {
            const Vec3 x = dom.cell_center(c);
            for (std::size_t v = 0; v < N; ++v) {
                const Vec3& vel = grid.node(v);
                for (std::size_t j = 0; j <= i; ++j) {
                    const auto st = dom.stencil(backward_characteristic(dom, x, vel, times[i] - times[j]));
                    double g = 0.0, s = 0.0;
                    for (int k = 0; k < st.count; ++k) {
                        g += st.weight[k] * ops[j].g[st.cell[k] * N + v];
                        s += st.weight[k] * ops[j].sigma[st.cell[k] * N + v];
                    }
                    gj[j] = g;
                    sj[j] = s;
                }
                const auto st0 = dom.stencil(backward_characteristic(dom, x, vel, times[i] - t_start));
                double value = 0.0;
                for (int k = 0; k < st0.count; ++k) value += st0.weight[k] * f0_.at(st0.cell[k], v);
                double tail = 0.0;  // G(t_i) - G(t_{j+1})
                double duhamel = 0.0;
                for (std::size_t j = i; j-- > 0;) {
                    const double a = 0.5 * (times[j + 1] - times[j]) * (gj[j] + gj[j + 1]);
                    duhamel += std::exp(-tail) * a * (sj[j] * psi_left(a) + sj[j + 1] * psi_right(a));
                    tail += a;
                }
                slice.at(c, v) = std::exp(-tail) * value + duhamel;
            }
        }
        out.slices.push_back(std::move(slice));
    }

    const auto mu = grid.maxwellian();
    const auto sq = grid.sqrt_maxwellian();
    double fmax = 0.0, fmin = 0.0;
    for (const auto& s : out.slices)
        for (std::size_t c = 0; c < s.cells(); ++c)
            for (std::size_t v = 0; v < N; ++v) {
                const double F = mu[v] + sq[v] * s.at(c, v);
                if (!std::isfinite(F)) throw NumericalError("Picard iterate is not finite");
                fmax = std::max(fmax, F);
                fmin = std::min(fmin, F);
            }
    if (fmin < -config_.positivity_tol * fmax) {
        std::ostringstream os;
        os << "F^{n+1} reaches " << fmin << " against max " << fmax;
        throw PositivityError(os.str());
    }
    return out;
}

double PicardMap::residual(const Trajectory& f) const {
    const auto next = apply(f);
    double r = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto a = f.slices[i].values(), b = next.slices[i].values();
        for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]));
    }
    return r;
}

Trajectory picard_iterate(const CollisionEngine& engine, const Trajectory& fn, const PerturbationField& f0,
                          const SolverConfig& config) {
    return PicardMap(engine, f0, config).apply(fn);
}

namespace {

double difference_norm(const Trajectory& a, const Trajectory& b, const WeightSpec& spec) {
    Trajectory d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        PerturbationField s(a.slices[i].grid_ptr(), a.slices[i].domain(), a.slices[i].time());
        const auto x = a.slices[i].values(), y = b.slices[i].values();
        auto out = s.values();
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] - y[k];
        d.slices.push_back(std::move(s));
    }
    return norm_lp_v_linf_window(d, spec.beta, spec.p);
}

double min_F_ratio(const Trajectory& f) {
    const auto mu = f.front().grid().maxwellian();
    const auto sq = f.front().grid().sqrt_maxwellian();
    double lo = kInfinity, hi = 0.0;
    for (const auto& s : f.slices)
        for (std::size_t c = 0; c < s.cells(); ++c)
            for (std::size_t v = 0; v < mu.size(); ++v) {
                const double F = mu[v] + sq[v] * s.at(c, v);
                lo = std::min(lo, F);
                hi = std::max(hi, F);
            }
    return lo / hi;
}

} // namespace

LocalSolution local_solve(const CollisionEngine& engine, const PerturbationField& f0, const SolverConfig& config,
                          const WeightSpec& spec) {
    config.validate();
    spec.validate(engine.params().gamma);
    const auto mu = f0.grid().maxwellian();
    const auto sq = f0.grid().sqrt_maxwellian();
    for (std::size_t c = 0; c < f0.cells(); ++c)
        for (std::size_t v = 0; v < mu.size(); ++v)
            if (mu[v] + sq[v] * f0.at(c, v) < -config.positivity_tol * mu[v])
                throw InputError("initial distribution F0 is negative");

    LocalSolution sol;
    sol.T1 = compute_T1(f0, spec.beta, spec.p, config.c1);
    sol.length = std::min(config.horizon, sol.T1);
    std::vector<double> times;
    for (int j = 0; j <= config.substeps; ++j) times.push_back(f0.time() + sol.length * j / config.substeps);

    const PicardMap map(engine, f0, config);
    Trajectory current = map.zero(times);
    sol.min_F_ratio = min_F_ratio(current);
    for (int n = 0; n < config.picard_max_iters; ++n) {
        Trajectory next = map.apply(current);
        const double d = difference_norm(next, current, spec);
        auto& tr = sol.trace;
        if (!tr.differences.empty() && tr.differences.back() > config.picard_tol * 1e-3)
            tr.ratios.push_back(d / tr.differences.back());
        tr.differences.push_back(d);
        tr.norms.push_back(norm_lp_v_linf_window(next, spec.beta, spec.p));
        tr.iterations = n + 1;
        sol.min_F_ratio = std::min(sol.min_F_ratio, min_F_ratio(next));
        current = std::move(next);
        if (d < config.picard_tol) {
            tr.converged = true;
            break;
        }
    }
    if (!sol.trace.converged) {
        std::ostringstream os;
        os << "Picard iteration did not reach " << config.picard_tol << " in " << config.picard_max_iters
           << " iterations (last difference " << sol.trace.differences.back() << ")";
        throw DivergenceError(os.str(), sol.trace);
    }
    sol.trajectory = std::move(current);
    return sol;
}

double mild_residual(const CollisionEngine& engine, const Trajectory& f, const PerturbationField& f0,
                     const SolverConfig& config) {
    return PicardMap(engine, f0, config).residual(f);
}

double MarchResult::max_entropy_increase() const noexcept {
    double worst = -kInfinity;
    for (std::size_t i = 1; i < entropy.size(); ++i) worst = std::max(worst, entropy[i] - entropy[i - 1]);
    return entropy.size() < 2 ? 0.0 : worst;
}

MarchResult time_march(const CollisionEngine& engine, const PerturbationField& f0, int windows,
                       const SolverConfig& config, const WeightSpec& spec) {
    if (windows < 1) throw InputError("time_march needs at least one window");
    MarchResult res;
    PerturbationField current = f0;
    res.entropy.push_back(entropy_functional(to_distribution(current)));
    for (int w = 0; w < windows; ++w) {
        LocalSolution sol;
        try {
            sol = local_solve(engine, current, config, spec);
        } catch (const DivergenceError& e) {
            throw DivergenceError("window " + std::to_string(w) + ": " + e.what(), e.trace());
        } catch (const PositivityError& e) {
            throw PositivityError("window " + std::to_string(w) + ": " + e.what());
        }
        WindowRecord rec;
        rec.t0 = sol.trajectory.front().time();
        rec.t1 = sol.trajectory.back().time();
        rec.T1 = sol.T1;
        rec.report = norm_report(sol.trajectory, spec, rec.t0, rec.t1);
        rec.trace = sol.trace;
        rec.min_F_ratio = sol.min_F_ratio;
        res.entropy.push_back(rec.report.entropy);
        res.windows.push_back(std::move(rec));
        for (std::size_t i = res.trajectory.empty() ? 0 : 1; i < sol.trajectory.size(); ++i)
            res.trajectory.slices.push_back(sol.trajectory.slices[i]);
        current = sol.trajectory.back();
    }
    return res;
}

} // namespace softboltz
