#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "softboltz/fields.hpp"
#include "softboltz/phase_space.hpp"

namespace softboltz {

/// |v-u|^gamma * b0 |cos theta|. Throws InputError for u == v or non-unit omega.
double collision_kernel(const Vec3& v, const Vec3& u, const Vec3& omega, const KernelParams& params);

/// Angular rule for integrals of g(omega) |cos theta| over S^2 with g even in
/// omega, folded onto the upper hemisphere: Gauss-Legendre in x = cos^2 theta
/// (|cos theta| d omega = dx dphi / 2 per hemisphere) times an even number of
/// azimuths. Exact for even polynomials up to `order`. The node set is
/// invariant under theta -> pi/2 - theta, phi -> phi + pi, which exchanges
/// v' and u'.
class ScatteringRule {
public:
    struct Node {
        double cos_theta;
        double azimuth;
        double weight;  // includes |cos theta| and the omega, -omega fold
    };
    explicit ScatteringRule(int order);

    int order() const noexcept { return order_; }
    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    /// Sum of weights; 2 pi up to roundoff.
    double total() const noexcept;

private:
    int order_;
    std::vector<Node> nodes_;
};

/// How off-lattice values F(v'), G(u') are reconstructed.
///  - maxwellian_relative: trilinear interpolation of F/mu, then multiplied by
///    mu. Since mu(v')mu(u') = mu(v)mu(u), Q(mu, mu) vanishes node by node.
///  - plain: trilinear interpolation of F itself.
/// Both use zero extension outside the box.
enum class Interpolation { maxwellian_relative, plain };

/// Multiplier chi(|v-u|) on the kernel, with the matching integral over the
/// coincident cell.
struct RadialFilter {
    std::function<double(double)> factor;
    /// Integral of chi(|z|) |z|^gamma over the ball of volume h^3.
    double singular_cell = 0.0;
};

/// Lattice quadrature of the collision integrals.
///
/// With W(z, omega) = h^3 |z|^gamma b0 |cos theta| w_omega and z = v - u on the
/// lattice, the engine evaluates
///   gain:  G_xy(v) = sum_{u, omega} W rho(u) I[x](v') I[y](u')
///   loss:  L(v)    = sum_u Wbar(v - u) s(u),   Wbar(z) = sum_omega W(z, omega)
/// where I[x] is trilinear interpolation with zero extension and I[1] is the
/// interpolated indicator of the box. The angular rule is aligned with z, so
/// the omega-sum of W equals Wbar to roundoff. Because the rule is symmetric
/// under the v' <-> u' exchange, sum W rho I[1](v') I[y](u') equals the kA1
/// output with x = y, so it is not computed separately.
/// The coincident node z = 0 uses singular_cell_weight(gamma, h).
class CollisionEngine {
public:
    CollisionEngine(GridPtr grid, int sphere_order, KernelParams params, int threads = 1);

    const VelocityGrid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const ScatteringRule& rule() const noexcept { return rule_; }
    const KernelParams& params() const noexcept { return params_; }
    int threads() const noexcept { return threads_; }

    /// Integral of b0 |cos theta| over S^2 under the sphere rule (2 pi b0 exactly in theory).
    double angular_mass() const noexcept { return angular_mass_; }
    /// Wbar(z) for a lattice offset; z = 0 gives the coincident-cell weight.
    double loss_weight(int zx, int zy, int zz, const RadialFilter* filter = nullptr) const;

    enum Output : unsigned { kAB = 1u, kA1 = 2u };
    struct GainSums {
        std::vector<double> ab;
        std::vector<double> a1;
    };
    /// Requested outputs only; the others stay empty.
    GainSums gain_sums(std::span<const double> a, std::span<const double> b, std::span<const double> rho,
                       unsigned outputs, const RadialFilter* filter = nullptr) const;
    std::vector<double> loss_sum(std::span<const double> s, const RadialFilter* filter = nullptr) const;

    /// nu at every node: loss_sum(mu).
    std::span<const double> frequency() const noexcept { return nu_; }

private:
    GridPtr grid_;
    ScatteringRule rule_;
    KernelParams params_;
    int threads_;
    double angular_mass_;
    double cell_weight_;
    std::vector<double> nu_;
};

/// Trilinear interpolation of nodal values at p, zero outside the box.
double trilinear(const VelocityGrid& grid, std::span<const double> values, const Vec3& p);

/// nu(v) = sum_u Wbar(v - u) mu(u) for an arbitrary point v.
double collision_frequency(const Vec3& v, const VelocityGrid& grid, const SphereQuadrature& sphere,
                           const KernelParams& params);

/// Continuum nu(|v|) = b0 2 pi int |v-u|^gamma mu(u) du by radial quadrature
/// (the angular u-integral is done in closed form). Used as the reference for
/// the lattice frequency.
double maxwellian_frequency(double speed, const KernelParams& params);

/// Q+(F, G) and Q-(F, G) over every velocity node of one cell.
std::vector<double> q_gain(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                           std::size_t cell, Interpolation mode = Interpolation::maxwellian_relative);
std::vector<double> q_loss(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                           std::size_t cell);

/// Single-node evaluation by direct summation over (u, omega) with both
/// hemispheres and pointwise post-collision velocities; shares only the
/// angular nodes with the lattice sweep.
double q_gain_at(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                 std::size_t cell, std::size_t v, Interpolation mode = Interpolation::maxwellian_relative);
double q_loss_at(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                 std::size_t cell, std::size_t v);

/// Gamma+(f, f) = mu^{-1/2} Q+(sqrt(mu) f, sqrt(mu) f), evaluated with the
/// sqrt(mu) factors folded into the quadrature.
std::vector<double> gamma_plus(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell);
/// Gamma-(f, f)(v) = f(v) * sum_u Wbar(v - u) sqrt(mu(u)) f(u).
std::vector<double> gamma_minus(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell);
double gamma_plus_at(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell, std::size_t v);
double gamma_minus_at(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell, std::size_t v);

/// g(v) = sum_u Wbar(v - u) F(u) = nu(v) + loss rate of sqrt(mu) f.
std::vector<double> g_field(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell);
double g_field_at(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell, std::size_t v);

} // namespace softboltz
