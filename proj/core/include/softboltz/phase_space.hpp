#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "softboltz/vec3.hpp"

namespace softboltz {

inline constexpr double kPi = std::numbers::pi;

/// Soft-potential cutoff kernel B(v-u, theta) = |v-u|^gamma * b0 |cos theta|.
struct KernelParams {
    double gamma = -1.0;
    double b0 = 1.0;
    double m_cutoff = 0.5;

    /// Throws InputError unless -3 < gamma < 0, b0 > 0 and 0 < m_cutoff <= 1.
    void validate() const;
};

/// Truncated Cartesian lattice [-L, L]^3 with n (odd) nodes per axis.
/// Node (i, j, k) sits at (-L + i h, -L + j h, -L + k h) with h = 2L/(n-1);
/// the flat index is (i n + j) n + k.
class VelocityGrid {
public:
    VelocityGrid(double extent, int nodes_per_axis);

    double extent() const noexcept { return extent_; }
    int nodes_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double cell_volume() const noexcept { return h_ * h_ * h_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    std::size_t index(int i, int j, int k) const noexcept {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    std::array<int, 3> multi_index(std::size_t idx) const noexcept;
    double coordinate(int i) const noexcept { return -extent_ + i * h_; }

    const Vec3& node(std::size_t idx) const noexcept { return nodes_[idx]; }
    std::span<const Vec3> nodes() const noexcept { return nodes_; }
    /// mu(v) at every node.
    std::span<const double> maxwellian() const noexcept { return mu_; }
    /// sqrt(mu(v)) at every node.
    std::span<const double> sqrt_maxwellian() const noexcept { return sqrt_mu_; }
    /// Index of the node v = 0.
    std::size_t origin() const noexcept { return index(n_ / 2, n_ / 2, n_ / 2); }
    /// Index of the node -v.
    std::size_t reflect(std::size_t idx) const noexcept { return size() - 1 - idx; }

    bool same_as(const VelocityGrid& o) const noexcept { return extent_ == o.extent_ && n_ == o.n_; }

private:
    double extent_;
    int n_;
    double h_;
    std::vector<Vec3> nodes_;
    std::vector<double> mu_;
    std::vector<double> sqrt_mu_;
};

/// Product rule on S^2: Gauss-Legendre in cos(theta), split at the equator so
/// that |cos theta| is integrated exactly, times a uniform azimuthal rule.
/// `order` is the polynomial degree integrated exactly.
class SphereQuadrature {
public:
    explicit SphereQuadrature(int order);

    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const Vec3> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// The rule expressed in a frame whose pole is `axis`.
    std::vector<Vec3> rotated_nodes(const Vec3& axis) const;

    template <class Fn>
    double integrate(Fn&& fn) const {
        double s = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * fn(nodes_[k]);
        return s;
    }
    /// Integral of |omega . axis| * fn(omega) with the rule aligned to `axis`.
    template <class Fn>
    double integrate_abs_cos(const Vec3& axis, Fn&& fn) const {
        const auto rotated = rotated_nodes(axis);
        double s = 0.0;
        for (std::size_t k = 0; k < rotated.size(); ++k)
            s += weights_[k] * std::abs(polar_[k]) * fn(rotated[k]);
        return s;
    }

    /// Upper-hemisphere nodes (cos theta > 0) as (cos theta, azimuth, weight).
    struct PolarNode {
        double cos_theta;
        double azimuth;
        double weight;
    };
    std::span<const PolarNode> upper_hemisphere() const noexcept { return upper_; }

private:
    int order_;
    std::vector<Vec3> nodes_;
    std::vector<double> weights_;
    std::vector<double> polar_;
    std::vector<PolarNode> upper_;
};

/// Orthonormal frame (e1, e2, pole) with pole = axis/|axis|. The frame of -axis
/// is the reflection of the frame of axis.
std::array<Vec3, 3> frame_for(const Vec3& axis);

enum class DomainMode { homogeneous, slab1d, torus3d };

DomainMode parse_domain_mode(const std::string& s);
std::string to_string(DomainMode mode);

/// Periodic spatial domain. Cells are uniform; cell c of a slab has center
/// (c + 1/2) * period / cells. The homogeneous mode is a single cell of
/// volume `volume()`.
class SpatialDomain {
public:
    static SpatialDomain homogeneous(double volume = 1.0);
    static SpatialDomain slab1d(double period, int cells);
    static SpatialDomain torus3d(double period, int cells_per_axis);

    DomainMode mode() const noexcept { return mode_; }
    double period() const noexcept { return period_; }
    int cells_per_axis() const noexcept { return cells_; }
    std::size_t cell_count() const noexcept;
    double cell_volume() const noexcept;
    double volume() const noexcept;
    double cell_width() const noexcept { return period_ / cells_; }

    /// Center of cell `c`. Unused coordinates are zero.
    Vec3 cell_center(std::size_t c) const noexcept;
    /// Maps a coordinate into [0, period).
    double wrap(double x) const noexcept;

    /// Linear periodic interpolation stencil at position x: up to 8 (cell, weight) pairs.
    struct Stencil {
        std::array<std::size_t, 8> cell{};
        std::array<double, 8> weight{};
        int count = 0;
    };
    Stencil stencil(const Vec3& x) const noexcept;

    bool same_as(const SpatialDomain& o) const noexcept {
        return mode_ == o.mode_ && period_ == o.period_ && cells_ == o.cells_;
    }

private:
    SpatialDomain(DomainMode mode, double period, int cells) : mode_(mode), period_(period), cells_(cells) {}
    DomainMode mode_;
    double period_;
    int cells_;
};

/// (2 pi)^{-3/2} exp(-|v|^2 / 2).
double maxwellian(const Vec3& v) noexcept;

struct CollisionPair {
    Vec3 v_post;
    Vec3 u_post;
};

/// v' = v - [(v-u).omega] omega, u' = u + [(v-u).omega] omega.
/// Throws InputError if | |omega| - 1 | > 1e-12.
CollisionPair post_collision(const Vec3& v, const Vec3& u, const Vec3& omega);

/// Foot of the characteristic x - v * elapsed, wrapped into the domain.
Vec3 backward_characteristic(const SpatialDomain& domain, const Vec3& x, const Vec3& v, double elapsed);

/// Integral of |z|^exponent over the ball of volume h^3 centered at 0.
/// Throws DivergentIntegralError for exponent <= -3.
double singular_cell_weight(double exponent, double h);

/// Radius of the ball with volume h^3.
double equivalent_radius(double h) noexcept;

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points);

} // namespace softboltz
