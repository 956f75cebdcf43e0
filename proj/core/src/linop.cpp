#include "softboltz/linop.hpp"

#include <algorithm>
#include <cmath>

#include "softboltz/error.hpp"

namespace softboltz {

CutoffProfile::CutoffProfile(double m) : m_(m) {
    if (!(m > 0.0) || !std::isfinite(m)) throw InputError("cutoff scale m must be positive");
}

double CutoffProfile::operator()(double tau) const noexcept {
    if (tau <= m_) return 1.0;
    if (tau >= 2.0 * m_) return 0.0;
    const double x = (tau - m_) / m_;
    return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

RadialFilter CutoffProfile::filter(double gamma, double h, bool complement) const {
    const double total = singular_cell_weight(gamma, h);
    const double r_eq = equivalent_radius(h);
    // 4 pi int_0^{r_eq} chi(r) r^{2+gamma} dr: exact on [0, m], Gauss on the ramp.
    const double flat = std::min(r_eq, m_);
    double inner = 4.0 * kPi * std::pow(flat, 3.0 + gamma) / (3.0 + gamma);
    if (r_eq > m_) {
        const double b = std::min(r_eq, 2.0 * m_);
        const auto [x, w] = gauss_legendre(32);
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double r = 0.5 * (m_ + b) + 0.5 * (b - m_) * x[k];
            inner += 4.0 * kPi * 0.5 * (b - m_) * w[k] * (*this)(r) * std::pow(r, 2.0 + gamma);
        }
    }
    RadialFilter out;
    const CutoffProfile self = *this;
    if (complement) {
        out.factor = [self](double r) { return 1.0 - self(r); };
        out.singular_cell = total - inner;
    } else {
        out.factor = self;
        out.singular_cell = inner;
    }
    return out;
}

namespace {

std::vector<double> apply_filtered(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell,
                                   const RadialFilter* filter) {
    if (!engine.grid().same_as(f.grid())) throw InputError("field and engine use different velocity grids");
    if (cell >= f.cells()) throw InputError("cell index out of range");
    const auto phi = f.ratio(cell);
    const auto mu = engine.grid().maxwellian();
    const auto sq = engine.grid().sqrt_maxwellian();
    const auto gain = engine.gain_sums(phi, phi, mu, CollisionEngine::kA1, filter);
    std::vector<double> s(phi.size());
    for (std::size_t u = 0; u < s.size(); ++u) s[u] = mu[u] * phi[u];
    const auto loss = engine.loss_sum(s, filter);
    std::vector<double> out(phi.size());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = sq[v] * (2.0 * gain.a1[v] - loss[v]);
    return out;
}

} // namespace

std::vector<double> apply_K(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell) {
    return apply_filtered(engine, f, cell, nullptr);
}

std::vector<double> apply_Km(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell,
                             const CutoffProfile& profile) {
    const auto filter = profile.filter(engine.params().gamma, engine.grid().spacing());
    return apply_filtered(engine, f, cell, &filter);
}

std::vector<double> apply_Kc(const CollisionEngine& engine, const PerturbationField& f, std::size_t cell,
                             const CutoffProfile& profile) {
    const auto filter = profile.filter(engine.params().gamma, engine.grid().spacing(), true);
    return apply_filtered(engine, f, cell, &filter);
}

double apply_Km_at(const std::function<double(const Vec3&)>& f, const Vec3& v, const CutoffProfile& profile,
                   const KernelParams& params, const PointwiseRule& rule) {
    params.validate();
    const double m = profile.m();
    const double g = params.gamma;
    // Radial nodes with weight r^{2+gamma} chi(r) dr; r = m t^2 on [0, m]
    // smooths the r^{2+gamma} endpoint behaviour.
    std::vector<std::pair<double, double>> radial;
    const auto [x, w] = gauss_legendre(rule.radial_points);
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = 0.5 * (x[k] + 1.0);
        const double r = m * t * t;
        radial.emplace_back(r, 0.5 * w[k] * 2.0 * m * t * std::pow(r, 2.0 + g));
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = 1.5 * m + 0.5 * m * x[k];
        radial.emplace_back(r, 0.5 * m * w[k] * std::pow(r, 2.0 + g) * profile(r));
    }
    const SphereQuadrature directions(rule.direction_order);
    const ScatteringRule scattering(rule.scattering_order);
    const double sq_v = std::sqrt(maxwellian(v));
    const auto dir_nodes = directions.nodes();
    const auto dir_weights = directions.weights();

    double total = 0.0;
    for (std::size_t d = 0; d < dir_nodes.size(); ++d) {
        const Vec3 zeta = dir_nodes[d];
        const auto [e1, e2, pole] = frame_for(zeta);
        for (const auto& [r, wr] : radial) {
            const Vec3 u = v - r * zeta;
            const double fu = f(u);
            const double sq_u = std::sqrt(maxwellian(u));
            double angular = 0.0;
            for (const auto& node : scattering.nodes()) {
                const double st = std::sqrt(std::max(0.0, 1.0 - node.cos_theta * node.cos_theta));
                const Vec3 omega =
                    node.cos_theta * pole + (st * std::cos(node.azimuth)) * e1 + (st * std::sin(node.azimuth)) * e2;
                const Vec3 shift = (r * node.cos_theta) * omega;  // ((v-u).omega) omega
                const Vec3 vp = v - shift;
                const Vec3 up = u + shift;
                angular += node.weight * (std::sqrt(maxwellian(up)) * f(vp) + std::sqrt(maxwellian(vp)) * f(up) -
                                          sq_v * fu);
            }
            total += dir_weights[d] * wr * sq_u * angular;
        }
    }
    return params.b0 * total;
}

bool ScalingFit::within(double tolerance) const noexcept {
    return std::abs(slope - target) <= tolerance * std::abs(target);
}

ScalingFit km_scaling(const KernelParams& params, double p, std::span<const double> m_list, ScalingFamily family,
                      const PointwiseRule& rule) {
    if (m_list.size() < 3) throw InputError("m sweep needs at least three values");
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (!(m_list[i] > 0.0) || m_list[i] > 1.0) throw InputError("m values must lie in (0, 1]");
        if (i > 0 && !(m_list[i] < m_list[i - 1])) throw InputError("m values must be strictly decreasing");
    }
    if (!(p > 1.0)) throw InputError("p must exceed 1");
    ScalingFit fit;
    const double p_conj = std::isinf(p) ? 1.0 : p / (p - 1.0);
    fit.target = params.gamma + 3.0 / p_conj;
    for (const double m : m_list) {
        const double scale = family == ScalingFamily::saturating ? m : 1.0;
        const double amp = family == ScalingFamily::saturating && !std::isinf(p) ? std::pow(m, -3.0 / p) : 1.0;
        const auto f = [scale, amp](const Vec3& u) { return amp * std::exp(-norm2(u) / (scale * scale)); };
        fit.m.push_back(m);
        fit.value.push_back(std::abs(apply_Km_at(f, {0.0, 0.0, 0.0}, CutoffProfile(m), params, rule)));
    }
    fit.slope = loglog_slope(fit.m, fit.value);
    return fit;
}

double kernel_k_bound(const Vec3& v, const Vec3& eta, const KernelParams& params) {
    const Vec3 z = v - eta;
    const double r2 = norm2(z);
    if (!(r2 > 0.0)) throw SingularPointError("kernel bound is singular at v == eta");
    const double r = std::sqrt(r2);
    const double g = params.gamma;
    const double v2 = norm2(v), e2 = norm2(eta);
    const double first = std::pow(r, g) * std::exp(-0.25 * v2 - 0.25 * e2);
    const double diff = v2 - e2;
    const double second = std::pow(r, -0.5 * (3.0 - g)) * std::exp(-0.125 * r2 - diff * diff / (8.0 * r2));
    return first + second;
}

double kernel_l_bound(const Vec3& v, const Vec3& eta, const KernelParams& params) {
    return kernel_k_bound(v, eta, params);
}

double BoundReport::decay_spread() const noexcept {
    if (rows.empty()) return 1.0;
    double lo = rows.front().decay, hi = lo;
    for (const auto& r : rows) {
        lo = std::min(lo, r.decay);
        hi = std::max(hi, r.decay);
    }
    return hi / lo;
}

double BoundReport::decay_max() const noexcept {
    double hi = 0.0;
    for (const auto& r : rows) hi = std::max(hi, r.decay);
    return hi;
}

double BoundReport::prol1_max() const noexcept {
    double hi = 0.0;
    for (const auto& r : rows) hi = std::max(hi, r.prol1);
    return hi;
}

namespace {

double weight_of(const Vec3& v, double beta) { return std::pow(1.0 + norm2(v), 0.5 * beta); }

// Angular average over z-hat of exp(-(v . z-hat)^2 / 2).
double gaussian_angle_average(double speed) {
    if (speed < 1e-12) return 1.0;
    return std::sqrt(kPi / 2.0) * std::erf(speed / std::sqrt(2.0)) / speed;
}

BoundReport bound_integrals(const CollisionEngine& engine, double beta, double m, double max_speed) {
    const VelocityGrid& grid = engine.grid();
    const KernelParams& kp = engine.params();
    const double h3 = grid.cell_volume();
    const int n = grid.nodes_per_axis();
    const int c = n / 2;
    const auto nu = engine.frequency();
    BoundReport rep;
    rep.beta = beta;
    rep.m = m;
    const double cell_first = singular_cell_weight(kp.gamma, grid.spacing());
    const double cell_second = singular_cell_weight(-0.5 * (3.0 - kp.gamma), grid.spacing());
    for (int i = c; i < n; ++i) {
        const std::size_t vi = grid.index(i, c, c);
        const Vec3 v = grid.node(vi);
        const double speed = norm(v);
        if (speed > max_speed + 1e-12) break;
        const double wv = weight_of(v, beta);
        double plain = 0.0, grown = 0.0, damped = 0.0;
        for (std::size_t e = 0; e < grid.size(); ++e) {
            if (e == vi) continue;
            const Vec3 eta = grid.node(e);
            const double b = kernel_l_bound(v, eta, kp) * wv / weight_of(eta, beta);
            plain += h3 * b;
            grown += h3 * b * std::exp(norm2(v - eta) / 20.0);
            damped += h3 * b * std::exp(-norm2(eta) / 20.0);
        }
        const double cell = cell_first * std::exp(-0.5 * speed * speed) + cell_second * gaussian_angle_average(speed);
        plain += cell;
        grown += cell;
        damped += cell * std::exp(-speed * speed / 20.0);
        const double shape = std::pow(m, kp.gamma - 1.0) * nu[vi] / ((1.0 + speed) * (1.0 + speed));
        rep.rows.push_back({speed, plain, (1.0 + speed) * plain, plain / shape, grown / shape,
                            damped / std::exp(-speed * speed / 100.0)});
    }
    return rep;
}

} // namespace

BoundReport verify_l_bounds(const CollisionEngine& engine, double beta, double m, double max_speed) {
    if (!(m > 0.0)) throw InputError("cutoff scale m must be positive");
    const double diameter = 2.0 * std::sqrt(3.0) * engine.grid().extent();
    if (m >= diameter) {
        BoundReport empty;
        empty.beta = beta;
        empty.m = m;
        return empty;
    }
    auto rep = bound_integrals(engine, beta, m, max_speed);
    for (const auto& r : rep.rows)
        if (!std::isfinite(r.integral)) throw NumericalError("kernel bound integral is not finite");
    return rep;
}

BoundReport verify_k_bounds(const CollisionEngine& engine, double beta, double max_speed) {
    auto rep = bound_integrals(engine, beta, 1.0, max_speed);
    for (auto& r : rep.rows) {
        r.prol1 = 0.0;
        r.prol4 = 0.0;
    }
    rep.m = 0.0;
    return rep;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit needs at least two matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InputError("log-log fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = k * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) throw InputError("slope fit needs distinct abscissae");
    return (k * sxy - sx * sy) / den;
}

} // namespace softboltz
