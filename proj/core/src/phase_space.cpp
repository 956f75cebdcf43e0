#include "softboltz/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "softboltz/error.hpp"

namespace softboltz {

void KernelParams::validate() const {
    if (!(gamma > -3.0 && gamma < 0.0))
        throw InputError("kernel.gamma must lie in (-3, 0), got " + std::to_string(gamma));
    if (!(b0 > 0.0)) throw InputError("kernel.b0 must be positive");
    if (!(m_cutoff > 0.0 && m_cutoff <= 1.0)) throw InputError("kernel.m must lie in (0, 1]");
}

double maxwellian(const Vec3& v) noexcept {
    static const double norm = std::pow(2.0 * kPi, -1.5);
    return norm * std::exp(-0.5 * norm2(v));
}

VelocityGrid::VelocityGrid(double extent, int nodes_per_axis) : extent_(extent), n_(nodes_per_axis) {
    if (!(extent > 0.0)) throw InputError("velocity extent must be positive");
    if (n_ < 3 || n_ % 2 == 0) throw InputError("nodes per axis must be odd and >= 3");
    h_ = 2.0 * extent_ / (n_ - 1);
    const std::size_t total = static_cast<std::size_t>(n_) * n_ * n_;
    nodes_.reserve(total);
    mu_.reserve(total);
    sqrt_mu_.reserve(total);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                // Symmetric construction keeps v(-idx) == -v(idx) bit-exactly.
                const Vec3 v{(i - n_ / 2) * h_, (j - n_ / 2) * h_, (k - n_ / 2) * h_};
                nodes_.push_back(v);
                mu_.push_back(softboltz::maxwellian(v));
                sqrt_mu_.push_back(std::sqrt(mu_.back()));
            }
}

std::array<int, 3> VelocityGrid::multi_index(std::size_t idx) const noexcept {
    const int k = static_cast<int>(idx % n_);
    const int j = static_cast<int>((idx / n_) % n_);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
    return {i, j, k};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
    if (points < 1) throw InputError("Gauss-Legendre needs at least one point");
    std::vector<double> x(points), w(points);
    for (int i = 0; i < (points + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (points + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= points; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            dp = points * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) <= 1e-15) break;
        }
        x[i] = -z;
        x[points - 1 - i] = z;
        w[i] = w[points - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (points % 2 == 1) x[points / 2] = 0.0;
    return {x, w};
}

std::array<Vec3, 3> frame_for(const Vec3& axis) {
    const double len = norm(axis);
    if (!(len > 0.0)) throw InputError("frame axis must be non-zero");
    const Vec3 pole = (1.0 / len) * axis;
    // Helper chosen from |components| only, so the frame of -axis is the
    // reflection of the frame of axis.
    const double ax = std::abs(pole.x), ay = std::abs(pole.y), az = std::abs(pole.z);
    Vec3 helper{1.0, 0.0, 0.0};
    if (ay <= ax && ay <= az) helper = {0.0, 1.0, 0.0};
    else if (az <= ax && az <= ay) helper = {0.0, 0.0, 1.0};
    Vec3 e1 = cross(helper, pole);
    e1 *= 1.0 / norm(e1);
    const Vec3 e2 = cross(pole, e1);
    return {e1, e2, pole};
}

SphereQuadrature::SphereQuadrature(int order) : order_(order) {
    if (order < 1) throw InputError("sphere order must be >= 1");
    const int polar_points = (order + 2) / 2;  // per hemisphere, exact to 2k-1 >= order
    const int azimuth_points = order + 1;
    const auto [gx, gw] = gauss_legendre(polar_points);
    const double dphi = 2.0 * kPi / azimuth_points;
    for (int hemi = 0; hemi < 2; ++hemi) {
        for (int a = 0; a < polar_points; ++a) {
            const double c = (hemi == 0 ? 1.0 : -1.0) * 0.5 * (gx[a] + 1.0);
            const double wc = 0.5 * gw[a];
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int b = 0; b < azimuth_points; ++b) {
                const double phi = b * dphi;
                nodes_.push_back({s * std::cos(phi), s * std::sin(phi), c});
                weights_.push_back(wc * dphi);
                polar_.push_back(c);
                if (hemi == 0) upper_.push_back({c, phi, wc * dphi});
            }
        }
    }
}

std::vector<Vec3> SphereQuadrature::rotated_nodes(const Vec3& axis) const {
    const auto [e1, e2, pole] = frame_for(axis);
    std::vector<Vec3> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.x * e1 + n.y * e2 + n.z * pole);
    return out;
}

DomainMode parse_domain_mode(const std::string& s) {
    if (s == "homogeneous") return DomainMode::homogeneous;
    if (s == "slab1d") return DomainMode::slab1d;
    if (s == "torus3d") return DomainMode::torus3d;
    throw InputError("unknown domain mode '" + s + "'");
}

std::string to_string(DomainMode mode) {
    switch (mode) {
        case DomainMode::homogeneous: return "homogeneous";
        case DomainMode::slab1d: return "slab1d";
        case DomainMode::torus3d: return "torus3d";
    }
    return "?";
}

SpatialDomain SpatialDomain::homogeneous(double volume) {
    if (!(volume > 0.0)) throw InputError("domain volume must be positive");
    return SpatialDomain(DomainMode::homogeneous, volume, 1);
}

SpatialDomain SpatialDomain::slab1d(double period, int cells) {
    if (!(period > 0.0) || cells < 1) throw InputError("slab needs period > 0 and cells >= 1");
    return SpatialDomain(DomainMode::slab1d, period, cells);
}

SpatialDomain SpatialDomain::torus3d(double period, int cells_per_axis) {
    if (!(period > 0.0) || cells_per_axis < 1) throw InputError("torus needs period > 0 and cells >= 1");
    return SpatialDomain(DomainMode::torus3d, period, cells_per_axis);
}

std::size_t SpatialDomain::cell_count() const noexcept {
    switch (mode_) {
        case DomainMode::homogeneous: return 1;
        case DomainMode::slab1d: return static_cast<std::size_t>(cells_);
        case DomainMode::torus3d: return static_cast<std::size_t>(cells_) * cells_ * cells_;
    }
    return 1;
}

double SpatialDomain::volume() const noexcept {
    switch (mode_) {
        case DomainMode::homogeneous:
        case DomainMode::slab1d: return period_;
        case DomainMode::torus3d: return period_ * period_ * period_;
    }
    return period_;
}

double SpatialDomain::cell_volume() const noexcept { return volume() / static_cast<double>(cell_count()); }

Vec3 SpatialDomain::cell_center(std::size_t c) const noexcept {
    const double dx = cell_width();
    switch (mode_) {
        case DomainMode::homogeneous: return {};
        case DomainMode::slab1d: return {(static_cast<double>(c) + 0.5) * dx, 0.0, 0.0};
        case DomainMode::torus3d: {
            const std::size_t n = static_cast<std::size_t>(cells_);
            return {(static_cast<double>(c / (n * n)) + 0.5) * dx, (static_cast<double>((c / n) % n) + 0.5) * dx,
                    (static_cast<double>(c % n) + 0.5) * dx};
        }
    }
    return {};
}

double SpatialDomain::wrap(double x) const noexcept {
    double r = std::fmod(x, period_);
    if (r < 0.0) r += period_;
    if (r >= period_) r = 0.0;  // fmod rounding on tiny negatives
    return r;
}

namespace {

struct Axis1D {
    std::array<std::size_t, 2> cell;
    std::array<double, 2> weight;
};

Axis1D axis_stencil(double x, double period, int cells) {
    const double dx = period / cells;
    double s = x / dx - 0.5;
    double fl = std::floor(s);
    double t = s - fl;
    long i0 = static_cast<long>(fl);
    auto mod = [cells](long i) { long r = i % cells; return static_cast<std::size_t>(r < 0 ? r + cells : r); };
    return {{mod(i0), mod(i0 + 1)}, {1.0 - t, t}};
}

} // namespace

SpatialDomain::Stencil SpatialDomain::stencil(const Vec3& x) const noexcept {
    Stencil st;
    switch (mode_) {
        case DomainMode::homogeneous:
            st.cell[0] = 0;
            st.weight[0] = 1.0;
            st.count = 1;
            break;
        case DomainMode::slab1d: {
            const auto a = axis_stencil(wrap(x.x), period_, cells_);
            st.cell = {a.cell[0], a.cell[1]};
            st.weight = {a.weight[0], a.weight[1]};
            st.count = 2;
            break;
        }
        case DomainMode::torus3d: {
            const auto ax = axis_stencil(wrap(x.x), period_, cells_);
            const auto ay = axis_stencil(wrap(x.y), period_, cells_);
            const auto az = axis_stencil(wrap(x.z), period_, cells_);
            const std::size_t n = static_cast<std::size_t>(cells_);
            int c = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int d = 0; d < 2; ++d) {
                        st.cell[c] = (ax.cell[a] * n + ay.cell[b]) * n + az.cell[d];
                        st.weight[c] = ax.weight[a] * ay.weight[b] * az.weight[d];
                        ++c;
                    }
            st.count = 8;
            break;
        }
    }
    return st;
}

CollisionPair post_collision(const Vec3& v, const Vec3& u, const Vec3& omega) {
    if (std::abs(norm(omega) - 1.0) > 1e-12) throw InputError("omega must be a unit vector");
    const double s = dot(v - u, omega);
    return {v - s * omega, u + s * omega};
}

Vec3 backward_characteristic(const SpatialDomain& domain, const Vec3& x, const Vec3& v, double elapsed) {
    if (elapsed < 0.0) throw InputError("elapsed time must be non-negative");
    switch (domain.mode()) {
        case DomainMode::homogeneous: return {};
        case DomainMode::slab1d: return {domain.wrap(x.x - v.x * elapsed), 0.0, 0.0};
        case DomainMode::torus3d:
            return {domain.wrap(x.x - v.x * elapsed), domain.wrap(x.y - v.y * elapsed),
                    domain.wrap(x.z - v.z * elapsed)};
    }
    return x;
}

double equivalent_radius(double h) noexcept { return h * std::cbrt(3.0 / (4.0 * kPi)); }

double singular_cell_weight(double exponent, double h) {
    if (!(exponent > -3.0)) throw DivergentIntegralError("|z|^a is not integrable at 0 for a <= -3");
    const double r = equivalent_radius(h);
    return 4.0 * kPi * std::pow(r, 3.0 + exponent) / (3.0 + exponent);
}

} // namespace softboltz
