#pragma once

#include <functional>
#include <span>
#include <vector>

#include "softboltz/collision.hpp"

namespace softboltz {

/// chi_m: 1 on [0, m], 0 on [2m, inf), quintic smoothstep in between.
class CutoffProfile {
public:
    explicit CutoffProfile(double m);

    double m() const noexcept { return m_; }
    double operator()(double tau) const noexcept;

    /// Filter selecting chi_m (complement = false) or 1 - chi_m, with the
    /// coincident-cell integral of chi |z|^gamma computed by radial quadrature.
    RadialFilter filter(double gamma, double h, bool complement = false) const;

private:
    double m_;
};

/// K f on every velocity node of one cell:
///   K f = sqrt(mu) (2 G[phi, 1] - L[mu phi]),  phi = f / sqrt(mu),
/// the linearization of the ratio-form Q around mu.
std::vector<double> apply_K(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell);
std::vector<double> apply_Km(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell,
                             const CutoffProfile& profile);
/// K - K^m in one pass with weight 1 - chi_m.
std::vector<double> apply_Kc(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell,
                             const CutoffProfile& profile);

/// Pointwise (K^m f)(v) for an analytic f, resolved on the scale of m: the
/// relative velocity runs over the ball |z| < 2m in polar coordinates, so the
/// evaluation does not depend on any velocity lattice.
struct PointwiseRule {
    int radial_points = 16;  // per radial segment [0, m] and [m, 2m]
    int direction_order = 12;
    int scattering_order = 12;
};
double apply_Km_at(const std::function<double(const Vec3&)>& f, const Vec3& v, const CutoffProfile& profile,
                   const KernelParams& params, const PointwiseRule& rule = {});

/// log |K^m f_m(0)| against log m for a strictly decreasing m-list (at least 3).
///  - saturating: f_m(u) = m^{-3/p} exp(-|u/m|^2), the L^p-normalized family
///    concentrating at the evaluation point; the pointwise bound for K^m is
///    attained, so the slope is gamma + 3/p'.
///  - fixed: f(u) = exp(-|u|^2) for every m; the slope tends to 3 + gamma.
enum class ScalingFamily { saturating, fixed };
struct ScalingFit {
    std::vector<double> m;
    std::vector<double> value;  // |K^m f_m(0)|
    double slope = 0.0;
    double target = 0.0;        // gamma + 3/p'
    /// |slope - target| <= tolerance |target|.
    bool within(double tolerance) const noexcept;
};
ScalingFit km_scaling(const KernelParams& params, double p, std::span<const double> m_list,
                      ScalingFamily family = ScalingFamily::saturating, const PointwiseRule& rule = {});

/// Unit-constant majorant of the K kernel:
///   |v-eta|^gamma e^{-|v|^2/4} e^{-|eta|^2/4}
///   + |v-eta|^{-(3-gamma)/2} e^{-|v-eta|^2/8} e^{-(|v|^2-|eta|^2)^2 / (8|v-eta|^2)}.
/// Symmetric in (v, eta). Throws SingularPointError for v == eta.
double kernel_k_bound(const Vec3& v, const Vec3& eta, const KernelParams& params);
/// The K^c kernel obeys a majorant of the same form.
double kernel_l_bound(const Vec3& v, const Vec3& eta, const KernelParams& params);

/// Weighted integrals of the majorant at sample velocities.
struct BoundRow {
    double speed;       // |v|
    double integral;    // int bound(v, eta) w(v)/w(eta) d eta
    double decay;       // (1 + |v|) * integral
    double prol1;       // integral / (m^{gamma-1} nu(v) / (1+|v|)^2)
    double prol4;       // same with the e^{|v-eta|^2/20} factor
    double gaussian;    // int ... e^{-|eta|^2/20} d eta / e^{-|v|^2/100}
};
struct BoundReport {
    double beta = 0.0;
    double m = 0.0;
    std::vector<BoundRow> rows;
    /// max / min of `decay` over the rows; 1 for an empty report.
    double decay_spread() const noexcept;
    double decay_max() const noexcept;
    double prol1_max() const noexcept;
};

/// Samples v on the positive first axis with |v| <= max_speed. The coincident
/// node uses the ball-of-equal-volume weight with the angular average of the
/// Gaussian factor. With `m` at or beyond the grid diameter K^c vanishes and
/// the report has no rows.
BoundReport verify_l_bounds(const CollisionEngine& engine, double beta, double m, double max_speed);
/// Same integrals for kernel_k_bound (no cutoff statistics).
BoundReport verify_k_bounds(const CollisionEngine& engine, double beta, double max_speed);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace softboltz
