#include "softboltz/collision.hpp"

#include <array>
#include <cmath>
#include <cstddef>

#include "softboltz/error.hpp"
#include "softboltz/parallel.hpp"

namespace softboltz {

double collision_kernel(const Vec3& v, const Vec3& u, const Vec3& omega, const KernelParams& params) {
    if (std::abs(norm(omega) - 1.0) > 1e-12) throw InputError("omega must be a unit vector");
    const Vec3 z = v - u;
    const double r = norm(z);
    if (!(r > 0.0)) throw InputError("collision_kernel is singular at u == v; use singular_cell_weight");
    return std::pow(r, params.gamma) * params.b0 * std::abs(dot(z, omega)) / r;
}

ScatteringRule::ScatteringRule(int order) : order_(order) {
    if (order < 1) throw InputError("scattering rule order must be >= 1");
    const int polar = (order + 2 + 3) / 4;  // 4k - 2 >= order
    const int azimuths = order + 1 + (order + 1) % 2;
    const auto [gx, gw] = gauss_legendre(polar);
    const double dphi = 2.0 * kPi / azimuths;
    for (int a = 0; a < polar; ++a) {
        const double x = 0.5 * (gx[a] + 1.0);
        for (int b = 0; b < azimuths; ++b) nodes_.push_back({std::sqrt(x), b * dphi, 0.5 * gw[a] * dphi});
    }
}

double ScatteringRule::total() const noexcept {
    double s = 0.0;
    for (const auto& node : nodes_) s += node.weight;
    return s;
}

namespace {

// Shared layout for the sweep: (n+2) x (n+2) x pk with a zero border. Rows are
// long enough that a vector chunk started at any valid k, plus its stencil,
// stays inside the row; lanes past the valid range read zeros and write into
// row padding only.
struct PaddedLayout {
    int n;
    std::ptrdiff_t pj, pk;

    explicit PaddedLayout(int nodes) : n(nodes), pj(nodes + 2), pk(((nodes + 6 + 3) / 4) * 4) {}
    std::size_t size() const noexcept { return static_cast<std::size_t>(pj * pj * pk); }
    std::ptrdiff_t at(int i, int j, int k) const noexcept { return ((i + 1) * pj + (j + 1)) * pk + (k + 1); }

    std::vector<double> scatter(std::span<const double> src) const {
        std::vector<double> out(size(), 0.0);
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) out[at(i, j, k)] = src[idx++];
        return out;
    }
    std::vector<double> gather(const std::vector<double>& padded) const {
        std::vector<double> out(static_cast<std::size_t>(n) * n * n);
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) out[idx++] = padded[at(i, j, k)];
        return out;
    }
};

constexpr int kLanes = 4;
using Lane = double __attribute__((vector_size(kLanes * sizeof(double)), aligned(alignof(double))));

inline Lane load(const double* p) noexcept { return *reinterpret_cast<const Lane*>(p); }
inline void store(double* p, Lane x) noexcept { *reinterpret_cast<Lane*>(p) = x; }

struct Shift {
    int s;
    double t;
};

Shift split(double d) noexcept {
    const double f = std::floor(d);
    return {static_cast<int>(f), d - f};
}

// Eight trilinear weights, corner bit order (i, j, k) -> (4, 2, 1).
std::array<double, 8> corner_weights(const Shift& x, const Shift& y, const Shift& z) noexcept {
    std::array<double, 8> w{};
    const double wx[2] = {1.0 - x.t, x.t}, wy[2] = {1.0 - y.t, y.t}, wz[2] = {1.0 - z.t, z.t};
    for (int c = 0; c < 8; ++c) w[c] = wx[(c >> 2) & 1] * wy[(c >> 1) & 1] * wz[c & 1];
    return w;
}

// One (z, omega) pair applied to a box of v nodes; every pointer addresses the
// first v of the box in the padded layout.
struct BlockArgs {
    const double* a;    // v' corner
    const double* b;    // u' corner
    const double* rho;  // u
    const double* ind_ux;
    const double* ind_uy;
    const double* ind_uz;
    double* out_ab;
    double* out_a1;
    int ni, nj, nk;  // nk rounded up to whole chunks
    std::ptrdiff_t si, sj;
    double weight;
};

template <bool AB, bool A1>
void sweep_block(const BlockArgs& r, const std::array<double, 8>& wv, const std::array<double, 8>& wu) noexcept {
    constexpr bool need_b = AB;
    const double v0 = wv[0], v1 = wv[1], v2 = wv[2], v3 = wv[3], v4 = wv[4], v5 = wv[5], v6 = wv[6], v7 = wv[7];
    const double u0 = wu[0], u1 = wu[1], u2 = wu[2], u3 = wu[3], u4 = wu[4], u5 = wu[5], u6 = wu[6], u7 = wu[7];
    const std::ptrdiff_t o2 = r.sj, o4 = r.si, o6 = r.si + r.sj;
    const double* __restrict iuz = r.ind_uz;
    const int chunks = r.nk / kLanes;
    const double W = r.weight;
    for (int i = 0; i < r.ni; ++i) {
        for (int j = 0; j < r.nj; ++j) {
            const std::ptrdiff_t row = i * r.si + j * r.sj;
            const double* __restrict a = r.a + row;
            const double* __restrict b = r.b + row;
            const double* __restrict rho = r.rho + row;
            double* __restrict oab = AB ? r.out_ab + row : nullptr;
            double* __restrict oa1 = A1 ? r.out_a1 + row : nullptr;
            const double fu = W * r.ind_ux[i] * r.ind_uy[j];
            for (int k = 0; k < chunks * kLanes; k += kLanes) {
                Lane va{}, vb{};
                va = v0 * load(a + k) + v1 * load(a + k + 1) + v2 * load(a + k + o2) + v3 * load(a + k + o2 + 1) +
                         v4 * load(a + k + o4) + v5 * load(a + k + o4 + 1) + v6 * load(a + k + o6) +
                         v7 * load(a + k + o6 + 1);
                if constexpr (need_b)
                    vb = u0 * load(b + k) + u1 * load(b + k + 1) + u2 * load(b + k + o2) + u3 * load(b + k + o2 + 1) +
                         u4 * load(b + k + o4) + u5 * load(b + k + o4 + 1) + u6 * load(b + k + o6) +
                         u7 * load(b + k + o6 + 1);
                const Lane rk = load(rho + k);
                if constexpr (AB) store(oab + k, load(oab + k) + W * rk * va * vb);
                if constexpr (A1) store(oa1 + k, load(oa1 + k) + fu * rk * va * load(iuz + k));
            }
        }
    }
}

using BlockFn = void (*)(const BlockArgs&, const std::array<double, 8>&, const std::array<double, 8>&) noexcept;

BlockFn select_block(unsigned outputs) {
    const bool ab = outputs & CollisionEngine::kAB, a1 = outputs & CollisionEngine::kA1;
    if (ab && a1) return &sweep_block<true, true>;
    if (ab) return &sweep_block<true, false>;
    return &sweep_block<false, true>;
}

} // namespace

CollisionEngine::CollisionEngine(GridPtr grid, int sphere_order, KernelParams params, int threads)
    : grid_(std::move(grid)), rule_(sphere_order), params_(params), threads_(threads < 1 ? 1 : threads) {
    if (!grid_) throw InputError("collision engine needs a velocity grid");
    params_.validate();
    angular_mass_ = params_.b0 * rule_.total();
    cell_weight_ = singular_cell_weight(params_.gamma, grid_->spacing());
    nu_ = loss_sum(grid_->maxwellian());
}

double CollisionEngine::loss_weight(int zx, int zy, int zz, const RadialFilter* filter) const {
    if (zx == 0 && zy == 0 && zz == 0)
        return angular_mass_ * (filter ? filter->singular_cell : cell_weight_);
    const double h = grid_->spacing();
    const double r = h * std::sqrt(static_cast<double>(zx * zx + zy * zy + zz * zz));
    const double chi = (filter && filter->factor) ? filter->factor(r) : 1.0;
    return angular_mass_ * h * h * h * std::pow(r, params_.gamma) * chi;
}

CollisionEngine::GainSums CollisionEngine::gain_sums(std::span<const double> a, std::span<const double> b,
                                                     std::span<const double> rho, unsigned outputs,
                                                     const RadialFilter* filter) const {
    const VelocityGrid& g = *grid_;
    const std::size_t N = g.size();
    if (a.size() != N || b.size() != N || rho.size() != N) throw InputError("gain_sums: field size mismatch");
    if ((outputs & 3u) == 0) throw InputError("gain_sums: no outputs requested");

    const int n = g.nodes_per_axis();
    const PaddedLayout lay(n);
    const auto A = lay.scatter(a);
    const auto B = lay.scatter(b);
    const auto R = lay.scatter(rho);
    std::vector<double> Oab, Oa1;
    if (outputs & kAB) Oab.assign(lay.size(), 0.0);
    if (outputs & kA1) Oa1.assign(lay.size(), 0.0);

    const double h = g.spacing();
    const double h3 = h * h * h;
    const auto angular = rule_.nodes();
    const BlockFn block = select_block(outputs);
    auto inside = [n](int x) { return x >= 0 && x < n ? 1.0 : 0.0; };

    parallel_for(threads_, static_cast<std::size_t>(n), [&](std::size_t i_begin, std::size_t i_end) {
        std::array<std::vector<double>, 3> ind_u;
        for (auto& x : ind_u) x.assign(static_cast<std::size_t>(n) + kLanes, 0.0);

        for (int zx = -(n - 1); zx <= n - 1; ++zx)
            for (int zy = -(n - 1); zy <= n - 1; ++zy)
                for (int zz = -(n - 1); zz <= n - 1; ++zz) {
                    if (zx == 0 && zy == 0 && zz == 0) continue;
                    const Vec3 zvec{zx * h, zy * h, zz * h};
                    const double r = norm(zvec);
                    const double chi = (filter && filter->factor) ? filter->factor(r) : 1.0;
                    if (chi == 0.0) continue;
                    const double base = h3 * std::pow(r, params_.gamma) * params_.b0 * chi;
                    const auto [e1, e2, pole] = frame_for(zvec);
                    const int zc[3] = {zx, zy, zz};

                    for (const auto& node : angular) {
                        const double c = node.cos_theta;
                        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
                        const Vec3 omega = c * pole + (s * std::cos(node.azimuth)) * e1 +
                                           (s * std::sin(node.azimuth)) * e2;
                        // v' = v + d h and u' = u - d h in lattice units.
                        const Vec3 d = (-r * c / h) * omega;
                        Shift sv[3], su[3];
                        int lo[3], hi[3];
                        bool empty = false;
                        for (int ax = 0; ax < 3; ++ax) {
                            sv[ax] = split(d[ax]);
                            su[ax] = split(-d[ax]);
                            lo[ax] = std::max({0, zc[ax], -sv[ax].s - 1, zc[ax] - su[ax].s - 1});
                            hi[ax] = std::min({n - 1, n - 1 + zc[ax], n - 1 - sv[ax].s, n - 1 + zc[ax] - su[ax].s});
                            if (ax == 0) {
                                lo[0] = std::max(lo[0], static_cast<int>(i_begin));
                                hi[0] = std::min(hi[0], static_cast<int>(i_end) - 1);
                            }
                            if (lo[ax] > hi[ax]) {
                                empty = true;
                                break;
                            }
                        }
                        if (empty) continue;
                        const int nk = ((hi[2] - lo[2] + 1 + kLanes - 1) / kLanes) * kLanes;
                        for (int ax = 0; ax < 3; ++ax) {
                            const int last = ax == 2 ? lo[2] + nk - 1 : hi[ax];
                            for (int i = lo[ax]; i <= last; ++i) {
                                const int iu = i - zc[ax];
                                ind_u[ax][i] = (1.0 - su[ax].t) * inside(iu + su[ax].s) + su[ax].t * inside(iu + su[ax].s + 1);
                            }
                        }
                        BlockArgs ba{};
                        ba.a = A.data() + lay.at(lo[0] + sv[0].s, lo[1] + sv[1].s, lo[2] + sv[2].s);
                        ba.b = B.data() + lay.at(lo[0] - zx + su[0].s, lo[1] - zy + su[1].s, lo[2] - zz + su[2].s);
                        ba.rho = R.data() + lay.at(lo[0] - zx, lo[1] - zy, lo[2] - zz);
                        const std::ptrdiff_t v0 = lay.at(lo[0], lo[1], lo[2]);
                        ba.out_ab = Oab.empty() ? nullptr : Oab.data() + v0;
                        ba.out_a1 = Oa1.empty() ? nullptr : Oa1.data() + v0;
                        ba.ind_ux = ind_u[0].data() + lo[0];
                        ba.ind_uy = ind_u[1].data() + lo[1];
                        ba.ind_uz = ind_u[2].data() + lo[2];
                        ba.ni = hi[0] - lo[0] + 1;
                        ba.nj = hi[1] - lo[1] + 1;
                        ba.nk = nk;
                        ba.si = lay.pj * lay.pk;
                        ba.sj = lay.pk;
                        ba.weight = base * node.weight;
                        block(ba, corner_weights(sv[0], sv[1], sv[2]), corner_weights(su[0], su[1], su[2]));
                    }
                }
    });

    GainSums out;
    if (!Oab.empty()) out.ab = lay.gather(Oab);
    if (!Oa1.empty()) out.a1 = lay.gather(Oa1);

    // Coincident cell: v' = v and u' = u = v for every omega.
    const double wc = loss_weight(0, 0, 0, filter);
    for (std::size_t v = 0; v < N; ++v) {
        const double wr = wc * rho[v];
        if (!out.ab.empty()) out.ab[v] += wr * a[v] * b[v];
        if (!out.a1.empty()) out.a1[v] += wr * a[v];
    }
    return out;
}

std::vector<double> CollisionEngine::loss_sum(std::span<const double> src, const RadialFilter* filter) const {
    const VelocityGrid& g = *grid_;
    const std::size_t N = g.size();
    if (src.size() != N) throw InputError("loss_sum: field size mismatch");
    const int n = g.nodes_per_axis();
    const int span_ = 2 * n - 1;
    std::vector<double> table(static_cast<std::size_t>(span_) * span_ * span_);
    for (int zx = -(n - 1); zx <= n - 1; ++zx)
        for (int zy = -(n - 1); zy <= n - 1; ++zy)
            for (int zz = -(n - 1); zz <= n - 1; ++zz)
                table[((zx + n - 1) * span_ + (zy + n - 1)) * span_ + (zz + n - 1)] = loss_weight(zx, zy, zz, filter);

    std::vector<double> out(N, 0.0);
    parallel_for(threads_, static_cast<std::size_t>(n), [&](std::size_t i_begin, std::size_t i_end) {
        for (int zx = -(n - 1); zx <= n - 1; ++zx)
            for (int zy = -(n - 1); zy <= n - 1; ++zy)
                for (int zz = -(n - 1); zz <= n - 1; ++zz) {
                    const double w = table[((zx + n - 1) * span_ + (zy + n - 1)) * span_ + (zz + n - 1)];
                    if (w == 0.0) continue;
                    const int ilo = std::max({0, zx, static_cast<int>(i_begin)});
                    const int ihi = std::min({n - 1, n - 1 + zx, static_cast<int>(i_end) - 1});
                    const int jlo = std::max(0, zy), jhi = std::min(n - 1, n - 1 + zy);
                    const int klo = std::max(0, zz), khi = std::min(n - 1, n - 1 + zz);
                    const std::ptrdiff_t zoff = (static_cast<std::ptrdiff_t>(zx) * n + zy) * n + zz;
                    for (int i = ilo; i <= ihi; ++i)
                        for (int j = jlo; j <= jhi; ++j) {
                            const std::ptrdiff_t v0 = (static_cast<std::ptrdiff_t>(i) * n + j) * n + klo;
                            double* __restrict o = out.data() + v0;
                            const double* __restrict s = src.data() + (v0 - zoff);
                            for (int k = 0; k <= khi - klo; ++k) o[k] += w * s[k];
                        }
                }
    });
    return out;
}

double trilinear(const VelocityGrid& grid, std::span<const double> values, const Vec3& p) {
    const int n = grid.nodes_per_axis();
    const double h = grid.spacing();
    const double L = grid.extent();
    int base[3];
    double t[3];
    for (int ax = 0; ax < 3; ++ax) {
        const double x = (p[ax] + L) / h;
        const double f = std::floor(x);
        base[ax] = static_cast<int>(f);
        t[ax] = x - f;
    }
    double s = 0.0;
    for (int c = 0; c < 8; ++c) {
        const int i = base[0] + ((c >> 2) & 1), j = base[1] + ((c >> 1) & 1), k = base[2] + (c & 1);
        if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k >= n) continue;
        const double w = (((c >> 2) & 1) ? t[0] : 1.0 - t[0]) * (((c >> 1) & 1) ? t[1] : 1.0 - t[1]) *
                         ((c & 1) ? t[2] : 1.0 - t[2]);
        s += w * values[grid.index(i, j, k)];
    }
    return s;
}

double collision_frequency(const Vec3& v, const VelocityGrid& grid, const SphereQuadrature& sphere,
                           const KernelParams& params) {
    params.validate();
    const double h = grid.spacing();
    const double angular = sphere.integrate_abs_cos({0.0, 0.0, 1.0}, [](const Vec3&) { return 1.0; }) * params.b0;
    const double cell = singular_cell_weight(params.gamma, h);
    const auto mu = grid.maxwellian();
    double s = 0.0;
    for (std::size_t u = 0; u < grid.size(); ++u) {
        const double r = norm(v - grid.node(u));
        const double w = r < 1e-12 * h ? cell : h * h * h * std::pow(r, params.gamma);
        s += w * mu[u];
    }
    return angular * s;
}

double maxwellian_frequency(double speed, const KernelParams& params) {
    params.validate();
    const double g = params.gamma;
    const double v = std::abs(speed);
    // int_{-1}^{1} |v - u|^gamma d(cos) = (|v+r|^{g+2} - |v-r|^{g+2}) / ((g+2) v r); 2 r^g at v = 0.
    const auto shell = [&](double r) {
        if (v < 1e-12 || r < 1e-12) return 2.0 * std::pow(std::max(v, r), g);
        return (std::pow(v + r, g + 2.0) - std::pow(std::abs(v - r), g + 2.0)) / ((g + 2.0) * v * r);
    };
    const auto [x, w] = gauss_legendre(64);
    const auto segment = [&](double a, double b) {
        double s = 0.0;
        // r = a + (b - a) t^2 absorbs the |v - r|^{g+2} kink and the r^g endpoint at r = 0.
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double t = 0.5 * (x[k] + 1.0);
            const double r = a + (b - a) * t * t;
            const double jac = 0.5 * w[k] * 2.0 * (b - a) * t;
            s += jac * r * r * std::exp(-0.5 * r * r) * shell(r);
        }
        return s;
    };
    const double upper = v + 14.0;
    const double radial = (v > 0.0 ? segment(0.0, v) : 0.0) + segment(v, upper);
    return params.b0 * 2.0 * kPi * 2.0 * kPi * std::pow(2.0 * kPi, -1.5) * radial;
}

namespace {

void require_cell(const LatticeField& f, std::size_t cell) {
    if (cell >= f.cells()) throw InputError("cell index out of range");
}

void require_engine(const CollisionEngine& e, const LatticeField& f) {
    if (!e.grid().same_as(f.grid())) throw InputError("field and collision engine use different velocity grids");
}

std::vector<double> divided(std::span<const double> x, std::span<const double> by) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / by[i];
    return out;
}

// Direct evaluation of sum_{u, omega} W rho-weighted I[a](v') I[b](u') at one node,
// over the full sphere aligned with v - u.
double direct_gain(const CollisionEngine& e, std::span<const double> a, std::span<const double> b,
                   std::span<const double> rho, std::size_t v, bool maxwell_fold) {
    const VelocityGrid& g = e.grid();
    const KernelParams& kp = e.params();
    const double h = g.spacing();
    const Vec3 vv = g.node(v);
    const auto [vi, vj, vk] = g.multi_index(v);
    double s = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (u == v) {
            s += e.loss_weight(0, 0, 0) * rho[u] * a[v] * b[u];
            continue;
        }
        const Vec3 uu = g.node(u);
        const auto [ui, uj, uk] = g.multi_index(u);
        // Frame from the exact lattice offset: v - uu in floating point can
        // break ties in frame_for differently and rotate the azimuths.
        const Vec3 z = h * Vec3{double(vi - ui), double(vj - uj), double(vk - uk)};
        const double mag = h * h * h * std::pow(norm(z), kp.gamma) * kp.b0;
        const auto [e1, e2, pole] = frame_for(z);
        double part = 0.0;
        for (const auto& node : e.rule().nodes()) {
            const double st = std::sqrt(std::max(0.0, 1.0 - node.cos_theta * node.cos_theta));
            const Vec3 up = node.cos_theta * pole + (st * std::cos(node.azimuth)) * e1 + (st * std::sin(node.azimuth)) * e2;
            for (const Vec3& omega : {up, -up}) {
                const auto post = post_collision(vv, uu, omega);
                const double fold = maxwell_fold ? maxwellian(post.v_post) * maxwellian(post.u_post) / maxwellian(vv) : rho[u];
                part += 0.5 * node.weight * fold * trilinear(g, a, post.v_post) * trilinear(g, b, post.u_post);
            }
        }
        s += mag * part;
    }
    return s;
}

} // namespace

std::vector<double> q_gain(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                           std::size_t cell, Interpolation mode) {
    F.require_compatible(G);
    require_engine(engine, F);
    require_cell(F, cell);
    const auto mu = engine.grid().maxwellian();
    if (mode == Interpolation::plain) {
        const std::vector<double> ones(mu.size(), 1.0);
        return engine.gain_sums(F.cell(cell), G.cell(cell), ones, CollisionEngine::kAB).ab;
    }
    const auto a = divided(F.cell(cell), mu);
    const auto b = divided(G.cell(cell), mu);
    auto out = engine.gain_sums(a, b, mu, CollisionEngine::kAB).ab;
    for (std::size_t v = 0; v < out.size(); ++v) out[v] *= mu[v];
    return out;
}

std::vector<double> q_loss(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                           std::size_t cell) {
    F.require_compatible(G);
    require_engine(engine, F);
    require_cell(F, cell);
    auto out = engine.loss_sum(G.cell(cell));
    const auto f = F.cell(cell);
    for (std::size_t v = 0; v < out.size(); ++v) out[v] *= f[v];
    return out;
}

double q_gain_at(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                 std::size_t cell, std::size_t v, Interpolation mode) {
    F.require_compatible(G);
    require_engine(engine, F);
    require_cell(F, cell);
    if (v >= engine.grid().size()) throw InputError("velocity index out of range");
    const auto mu = engine.grid().maxwellian();
    if (mode == Interpolation::plain) {
        const std::vector<double> ones(mu.size(), 1.0);
        return direct_gain(engine, F.cell(cell), G.cell(cell), ones, v, false);
    }
    const auto a = divided(F.cell(cell), mu);
    const auto b = divided(G.cell(cell), mu);
    // mu(v') mu(u') / mu(v) is evaluated pointwise here rather than folded.
    return mu[v] * direct_gain(engine, a, b, mu, v, true);
}

double q_loss_at(const CollisionEngine& engine, const DistributionField& F, const DistributionField& G,
                 std::size_t cell, std::size_t v) {
    F.require_compatible(G);
    require_engine(engine, F);
    require_cell(F, cell);
    const VelocityGrid& g = engine.grid();
    if (v >= g.size()) throw InputError("velocity index out of range");
    const auto [vi, vj, vk] = g.multi_index(v);
    const auto gc = G.cell(cell);
    double s = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto [ui, uj, uk] = g.multi_index(u);
        s += engine.loss_weight(vi - ui, vj - uj, vk - uk) * gc[u];
    }
    return F.at(cell, v) * s;
}

std::vector<double> gamma_plus(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell) {
    require_engine(engine, f);
    require_cell(f, cell);
    const auto phi = f.ratio(cell);
    const auto mu = engine.grid().maxwellian();
    const auto sq = engine.grid().sqrt_maxwellian();
    auto out = engine.gain_sums(phi, phi, mu, CollisionEngine::kAB).ab;
    for (std::size_t v = 0; v < out.size(); ++v) out[v] *= sq[v];
    return out;
}

std::vector<double> gamma_minus(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell) {
    require_engine(engine, f);
    require_cell(f, cell);
    const auto sq = engine.grid().sqrt_maxwellian();
    const auto fc = f.cell(cell);
    std::vector<double> s(fc.size());
    for (std::size_t u = 0; u < s.size(); ++u) s[u] = sq[u] * fc[u];
    auto out = engine.loss_sum(s);
    for (std::size_t v = 0; v < out.size(); ++v) out[v] *= fc[v];
    return out;
}

double gamma_plus_at(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell, std::size_t v) {
    require_engine(engine, f);
    require_cell(f, cell);
    if (v >= engine.grid().size()) throw InputError("velocity index out of range");
    const auto phi = f.ratio(cell);
    const auto mu = engine.grid().maxwellian();
    const auto sq = engine.grid().sqrt_maxwellian();
    return sq[v] * direct_gain(engine, phi, phi, mu, v, true);
}

double gamma_minus_at(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell, std::size_t v) {
    require_engine(engine, f);
    require_cell(f, cell);
    const VelocityGrid& g = engine.grid();
    if (v >= g.size()) throw InputError("velocity index out of range");
    const auto sq = g.sqrt_maxwellian();
    const auto fc = f.cell(cell);
    const auto [vi, vj, vk] = g.multi_index(v);
    double s = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto [ui, uj, uk] = g.multi_index(u);
        s += engine.loss_weight(vi - ui, vj - uj, vk - uk) * sq[u] * fc[u];
    }
    return fc[v] * s;
}

std::vector<double> g_field(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell) {
    require_engine(engine, f);
    require_cell(f, cell);
    const auto mu = engine.grid().maxwellian();
    const auto sq = engine.grid().sqrt_maxwellian();
    const auto fc = f.cell(cell);
    std::vector<double> s(fc.size());
    for (std::size_t u = 0; u < s.size(); ++u) s[u] = sq[u] * fc[u];
    auto out = engine.loss_sum(s);
    const auto nu = engine.frequency();
    for (std::size_t v = 0; v < out.size(); ++v) out[v] += nu[v];
    return out;
}

double g_field_at(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell, std::size_t v) {
    require_engine(engine, f);
    require_cell(f, cell);
    const VelocityGrid& g = engine.grid();
    if (v >= g.size()) throw InputError("velocity index out of range");
    const auto mu = g.maxwellian();
    const auto sq = g.sqrt_maxwellian();
    const auto fc = f.cell(cell);
    const auto [vi, vj, vk] = g.multi_index(v);
    double s = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto [ui, uj, uk] = g.multi_index(u);
        s += engine.loss_weight(vi - ui, vj - uj, vk - uk) * (mu[u] + sq[u] * fc[u]);
    }
    return s;
}

} // namespace softboltz
