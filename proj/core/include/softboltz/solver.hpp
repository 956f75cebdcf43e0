#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "softboltz/collision.hpp"
#include "softboltz/error.hpp"
#include "softboltz/fields.hpp"
#include "softboltz/norms.hpp"

namespace softboltz {

struct SolverConfig {
    double horizon = 1.0;          // cap on a window's length
    int substeps = 4;              // intervals per window
    double picard_tol = 1e-8;      // on the weighted difference norm
    int picard_max_iters = 20;
    double c1 = 1.0;
    double positivity_tol = 1e-10; // relative to max F
    bool collisions = true;        // false: free transport only

    /// Throws InputError unless picard_tol > 0, max iters >= 2, c1 > 0, substeps >= 2.
    void validate() const;
};

struct IterationTrace {
    std::vector<double> norms;        // ||w f^n|| for n = 1, 2, ...
    std::vector<double> differences;  // d_n = ||w (f^{n+1} - f^n)||, n = 0, 1, ...
    std::vector<double> ratios;       // d_{n+1} / d_n while d_n > 1e-3 picard_tol
    int iterations = 0;
    bool converged = false;

    /// Largest ratio from the given position on (0 if none).
    double max_ratio_from(std::size_t first) const noexcept;
    std::string csv() const;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, IterationTrace trace)
        : NumericalError(what), trace_(std::move(trace)) {}
    const IterationTrace& trace() const noexcept { return trace_; }

private:
    IterationTrace trace_;
};

class PositivityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// 1 / (6 c1 (1 + ||w_beta f0||_{L^p_v L^inf_x})).
double compute_T1(const PerturbationField& f0, double beta, double p, double c1);

/// One application of the Picard map on the substep times of `fn`:
///   f^{n+1}(t) = e^{-G(t)} f0(x - v t) + int_0^t e^{-(G(t)-G(s))} g^n(s) sigma^n(s) ds
/// along backward characteristics, with g^n the loss rate of F^n,
/// sigma^n = (K f^n + Gamma+(f^n, f^n)) / g^n and G the running integral of g^n.
/// G uses the trapezoid rule; on each interval sigma is linear and G is
/// linear, and the integral is done exactly. That is second order like the
/// trapezoid rule, and it keeps F^{n+1} = mu + sqrt(mu) f^{n+1} a convex
/// combination of F0 and Q+(F^n, F^n) / g^n, so positivity carries over from F^n.
class PicardMap {
public:
    PicardMap(const CollisionEngine& engine, PerturbationField f0, SolverConfig config);

    const PerturbationField& initial() const noexcept { return f0_; }
    const SolverConfig& config() const noexcept { return config_; }

    /// Throws PositivityError if g^n < 0 or F^{n+1} < -tol max F^{n+1}.
    Trajectory apply(const Trajectory& fn) const;
    /// Zero trajectory on `times`.
    Trajectory zero(const std::vector<double>& times) const;
    /// max |f - apply(f)| over every stored (t, x, v).
    double residual(const Trajectory& f) const;

private:
    struct SliceOps {
        std::vector<double> g;      // per cell, per velocity
        std::vector<double> sigma;
    };
    SliceOps ops_for(const PerturbationField& slice) const;

    const CollisionEngine* engine_;
    PerturbationField f0_;
    SolverConfig config_;
    SliceOps f0_ops_;
};

Trajectory picard_iterate(const CollisionEngine& engine, const Trajectory& fn, const PerturbationField& f0,
                          const SolverConfig& config);

struct LocalSolution {
    Trajectory trajectory;
    IterationTrace trace;
    double T1 = 0.0;
    double length = 0.0;  // min(horizon, T1)
    double min_F_ratio = 0.0;  // min_n min F^n / max F^n over all iterates
};

/// Picard iteration from f^0 = 0 on [t_start, t_start + min(horizon, T1)].
/// Throws DivergenceError after picard_max_iters without d_n < picard_tol.
LocalSolution local_solve(const CollisionEngine& engine, const PerturbationField& f0, const SolverConfig& config,
                          const WeightSpec& spec);

/// max |f - Picard map(f)| with the same time rule as the solver.
double mild_residual(const CollisionEngine& engine, const Trajectory& f, const PerturbationField& f0,
                     const SolverConfig& config);

struct WindowRecord {
    double t0 = 0.0;
    double t1 = 0.0;
    double T1 = 0.0;
    NormReport report;
    IterationTrace trace;
    double min_F_ratio = 0.0;
};

struct MarchResult {
    Trajectory trajectory;  // every stored slice, window joints once
    std::vector<WindowRecord> windows;
    /// Entropy at the start of the march followed by the end of every window.
    std::vector<double> entropy;
    /// Largest increase of the entropy between consecutive windows (<= 0 if monotone).
    double max_entropy_increase() const noexcept;
};

/// Consecutive local solves, each on a window of length min(horizon, T1)
/// with T1 recomputed from the window's initial data. Errors from a window
/// are rethrown with the window index prepended.
MarchResult time_march(const CollisionEngine& engine, const PerturbationField& f0, int windows,
                       const SolverConfig& config, const WeightSpec& spec);

} // namespace softboltz
