#include "softboltz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "softboltz/error.hpp"

namespace softboltz {

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

WeightMode parse_weight_mode(const std::string& s) {
    if (s == "theorem") return WeightMode::theorem;
    if (s == "exploratory") return WeightMode::exploratory;
    throw InputError("unknown weight mode '" + s + "'");
}

std::string to_string(WeightMode mode) { return mode == WeightMode::theorem ? "theorem" : "exploratory"; }

double WeightSpec::p_conj() const noexcept {
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

double WeightSpec::r() const {
    if (!(q > 0.0)) throw InputError("q is not set");
    return p - (p - q) / (4.0 * q);
}

double WeightSpec::p_threshold(double gamma) noexcept {
    return std::max({6.0 / (5.0 + gamma), 4.0 / (3.0 - gamma), 3.0 / (3.0 + gamma), (2.0 - gamma) / 2.0});
}

double WeightSpec::beta_threshold(double gamma, double p) noexcept {
    const double pc = std::isinf(p) ? 1.0 : p / (p - 1.0);
    return std::max({3.0 / pc, 36.0, 6.0 - 2.0 * gamma});
}

bool WeightSpec::admissible(double gamma) const noexcept {
    if (!(p > p_threshold(gamma))) return false;
    if (!(beta > beta_threshold(gamma, p))) return false;
    if (q > 0.0 && !(q > 3.0 / (3.0 + gamma) && q < p)) return false;
    return true;
}

void WeightSpec::validate(double gamma) const {
    if (!(p > 1.0)) throw InputError("p must exceed 1");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InputError("beta must be a finite non-negative number");
    if (q != 0.0 && !(q > 1.0 && q < p)) throw InputError("q must lie in (1, p)");
    if (mode == WeightMode::theorem && !admissible(gamma))
        throw InputError("weight exponents are not admissible in theorem mode; use exploratory mode");
}

double weight(const Vec3& v, double beta) noexcept { return std::pow(1.0 + norm2(v), 0.5 * beta); }

namespace {

bool in_window(double t, double t0, double t1) noexcept { return t >= t0 - 1e-12 && t <= t1 + 1e-12; }

// max over window slices and cells of |w f| at every velocity node.
std::vector<double> window_envelope(const Trajectory& f, double beta, double t0, double t1) {
    if (f.empty()) throw InputError("empty trajectory");
    const VelocityGrid& g = f.front().grid();
    std::vector<double> w(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) w[v] = weight(g.node(v), beta);
    std::vector<double> env(g.size(), 0.0);
    bool any = false;
    for (const auto& s : f.slices) {
        if (!in_window(s.time(), t0, t1)) continue;
        any = true;
        for (std::size_t c = 0; c < s.cells(); ++c) {
            const auto vals = s.cell(c);
            for (std::size_t v = 0; v < vals.size(); ++v) env[v] = std::max(env[v], w[v] * std::abs(vals[v]));
        }
    }
    if (!any) throw InputError("window contains no stored time");
    return env;
}

double lp_of(const std::vector<double>& env, double p, double h3) {
    if (std::isinf(p)) return env.empty() ? 0.0 : *std::max_element(env.begin(), env.end());
    // Scale by the maximum so that w^p does not overflow for large beta.
    const double top = env.empty() ? 0.0 : *std::max_element(env.begin(), env.end());
    if (!(top > 0.0)) return 0.0;
    CompensatedSum s;
    for (double e : env) s.add(h3 * std::pow(e / top, p));
    return top * std::pow(s.value(), 1.0 / p);
}

} // namespace

double norm_lp_v_linf_window(const Trajectory& f, double beta, double p, double t0, double t1) {
    const auto env = window_envelope(f, beta, t0, t1);
    return lp_of(env, p, f.front().grid().cell_volume());
}

double norm_lp_v_linf_window(const Trajectory& f, double beta, double p) {
    if (f.empty()) throw InputError("empty trajectory");
    return norm_lp_v_linf_window(f, beta, p, f.front().time(), f.back().time());
}

double norm_lp_v_linf_x(const PerturbationField& f, double beta, double p) {
    Trajectory t;
    t.slices.push_back(f);
    return norm_lp_v_linf_window(t, beta, p);
}

double norm_l1x_linfv(const PerturbationField& f) {
    CompensatedSum s;
    for (std::size_t c = 0; c < f.cells(); ++c) {
        double top = 0.0;
        for (double x : f.cell(c)) top = std::max(top, std::abs(x));
        s.add(f.domain().cell_volume() * top);
    }
    return s.value();
}

double norm_linf_t_linf_x_l1v(const Trajectory& f, double t0, double t1) {
    if (f.empty()) throw InputError("empty trajectory");
    const double h3 = f.front().grid().cell_volume();
    double top = 0.0;
    bool any = false;
    for (const auto& s : f.slices) {
        if (!in_window(s.time(), t0, t1)) continue;
        any = true;
        for (std::size_t c = 0; c < s.cells(); ++c) {
            CompensatedSum acc;
            for (double x : s.cell(c)) acc.add(h3 * std::abs(x));
            top = std::max(top, acc.value());
        }
    }
    if (!any) throw InputError("window contains no stored time");
    return top;
}

double norm_linf_t_linf_x_l1v(const Trajectory& f) {
    if (f.empty()) throw InputError("empty trajectory");
    return norm_linf_t_linf_x_l1v(f, f.front().time(), f.back().time());
}

Defects defects(const DistributionField& F) {
    const VelocityGrid& g = F.grid();
    const auto mu = g.maxwellian();
    const double dv = g.cell_volume() * F.domain().cell_volume();
    CompensatedSum m, jx, jy, jz, e;
    for (std::size_t c = 0; c < F.cells(); ++c) {
        const auto vals = F.cell(c);
        for (std::size_t v = 0; v < vals.size(); ++v) {
            const double d = dv * (vals[v] - mu[v]);
            const Vec3& x = g.node(v);
            m.add(d);
            jx.add(d * x.x);
            jy.add(d * x.y);
            jz.add(d * x.z);
            e.add(d * norm2(x));
        }
    }
    return {m.value(), {jx.value(), jy.value(), jz.value()}, e.value()};
}

double entropy_functional(const DistributionField& F) {
    constexpr double kFloor = 1e-300;
    const VelocityGrid& g = F.grid();
    const auto mu = g.maxwellian();
    const double dv = g.cell_volume() * F.domain().cell_volume();
    CompensatedSum s;
    bool mass = false;
    for (std::size_t c = 0; c < F.cells(); ++c) {
        const auto vals = F.cell(c);
        for (std::size_t v = 0; v < vals.size(); ++v) {
            if (vals[v] > kFloor) mass = true;
            const double ratio = vals[v] / mu[v];
            const double phi = ratio - 1.0;
            const double clipped = std::max(ratio, kFloor);
            // (1 + phi) log(1 + phi) - phi, via log1p near equilibrium.
            const double lg = std::abs(phi) < 0.5 ? std::log1p(phi) : std::log(clipped);
            s.add(dv * mu[v] * (ratio * lg - phi));
        }
    }
    if (!mass) throw InputError("entropy of a distribution without mass");
    return s.value();
}

Lemma24Gap lemma24_gap(const DistributionField& F, const DistributionField& F0) {
    F.require_compatible(F0);
    const VelocityGrid& g = F.grid();
    const auto mu = g.maxwellian();
    const double dv = g.cell_volume() * F.domain().cell_volume();
    CompensatedSum s;
    for (std::size_t c = 0; c < F.cells(); ++c) {
        const auto vals = F.cell(c);
        for (std::size_t v = 0; v < vals.size(); ++v) {
            const double d = vals[v] - mu[v];
            // |F - mu| = mu goes to the quadratic branch; both agree there.
            s.add(dv * (std::abs(d) <= mu[v] ? d * d / mu[v] : std::abs(d)));
        }
    }
    return {s.value(), 4.0 * entropy_functional(F0)};
}

double Lemma41Report::ratio_minus() const noexcept {
    return rhs_minus > 0.0 ? lhs_minus / rhs_minus : std::numeric_limits<double>::quiet_NaN();
}

double Lemma41Report::ratio_plus() const noexcept {
    return rhs_plus > 0.0 ? lhs_plus / rhs_plus : std::numeric_limits<double>::quiet_NaN();
}

bool Lemma41Report::violation() const noexcept {
    return (rhs_minus <= 0.0 && lhs_minus > 1e-300) || (rhs_plus <= 0.0 && lhs_plus > 1e-300);
}

ExponentIdentities exponent_identities(double p, double q) {
    if (!(q > 1.0 && q < p)) throw InputError("exponent identities need 1 < q < p");
    ExponentIdentities e{};
    const double r = p - (p - q) / (4.0 * q);
    const double eighth = (1.0 / q - 1.0 / p) / 8.0;
    e.minus_weighted = 1.0 + p * (q - 1.0) / (q * (p - 1.0));
    e.minus_l1 = (p - q) / (q * (p - 1.0));
    e.plus_weighted = eighth + 1.0 + r / p;
    e.plus_l1 = eighth;
    e.minus_sum = e.minus_weighted + e.minus_l1;
    e.plus_sum_rp = 2.0 * eighth + 1.0 + r / p;
    e.plus_sum_rq = 2.0 * eighth + 1.0 + r / q;
    return e;
}

std::vector<Lemma41Report> lemma41_check(const CollisionEngine& engine, const Trajectory& f,
                                         std::span<const WeightSpec> specs, double t0, double t1) {
    for (const auto& spec : specs)
        if (!(spec.q > 0.0)) throw InputError("lemma41_check needs q");
    const double gamma = engine.params().gamma;
    Trajectory minus, plus, window;
    for (const auto& s : f.slices) {
        if (!in_window(s.time(), t0, t1)) continue;
        PerturbationField gm(s.grid_ptr(), s.domain(), s.time());
        PerturbationField gp(s.grid_ptr(), s.domain(), s.time());
        for (std::size_t c = 0; c < s.cells(); ++c) {
            const auto a = gamma_minus(engine, s, c);
            const auto b = gamma_plus(engine, s, c);
            std::copy(a.begin(), a.end(), gm.cell(c).begin());
            std::copy(b.begin(), b.end(), gp.cell(c).begin());
        }
        minus.slices.push_back(std::move(gm));
        plus.slices.push_back(std::move(gp));
        window.slices.push_back(s);
    }
    if (window.empty()) throw InputError("window contains no stored time");
    const double l1 = norm_linf_t_linf_x_l1v(window);
    std::vector<Lemma41Report> out;
    out.reserve(specs.size());
    for (const auto& spec : specs) {
        const auto ex = exponent_identities(spec.p, spec.q);
        const double wf = norm_lp_v_linf_window(window, spec.beta, spec.p);
        Lemma41Report rep;
        rep.lhs_minus = norm_lp_v_linf_window(minus, spec.beta - gamma, spec.p);
        rep.lhs_plus = norm_lp_v_linf_window(plus, spec.beta - gamma, spec.p);
        rep.rhs_minus = std::pow(wf, ex.minus_weighted) * std::pow(l1, ex.minus_l1);
        rep.rhs_plus = std::pow(wf, ex.plus_weighted) * std::pow(l1, ex.plus_l1);
        out.push_back(rep);
    }
    return out;
}

Lemma41Report lemma41_check(const CollisionEngine& engine, const Trajectory& f, const WeightSpec& spec, double t0,
                            double t1) {
    return lemma41_check(engine, f, std::span<const WeightSpec>(&spec, 1), t0, t1).front();
}

std::string NormReport::to_text() const {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "weight_mode: " << to_string(mode) << '\n'
       << "lp_v_linf_t_linf_x: " << lp_v_linf_t_linf_x << '\n'
       << "lp_v_linf_x: " << lp_v_linf_x << '\n'
       << "l1x_linfv: " << l1x_linfv << '\n'
       << "linf_t_linf_x_l1v: " << linf_t_linf_x_l1v << '\n'
       << "M0: " << defect.mass << '\n'
       << "J0: " << defect.momentum.x << ' ' << defect.momentum.y << ' ' << defect.momentum.z << '\n'
       << "E0: " << defect.energy << '\n'
       << "entropy_functional: " << entropy << '\n';
    return os.str();
}

std::string NormReport::csv_header() {
    return "weight_mode,lp_v_linf_t_linf_x,lp_v_linf_x,l1x_linfv,linf_t_linf_x_l1v,M0,J0x,J0y,J0z,E0,entropy";
}

std::string NormReport::csv_row() const {
    std::ostringstream os;
    os << std::setprecision(12) << to_string(mode) << ',' << lp_v_linf_t_linf_x << ',' << lp_v_linf_x << ','
       << l1x_linfv << ',' << linf_t_linf_x_l1v << ',' << defect.mass << ',' << defect.momentum.x << ','
       << defect.momentum.y << ',' << defect.momentum.z << ',' << defect.energy << ',' << entropy;
    return os.str();
}

NormReport norm_report(const Trajectory& f, const WeightSpec& spec, double t0, double t1) {
    NormReport rep;
    rep.mode = spec.mode;
    rep.lp_v_linf_t_linf_x = norm_lp_v_linf_window(f, spec.beta, spec.p, t0, t1);
    rep.linf_t_linf_x_l1v = norm_linf_t_linf_x_l1v(f, t0, t1);
    const PerturbationField* first = nullptr;
    const PerturbationField* last = nullptr;
    for (const auto& s : f.slices) {
        if (!in_window(s.time(), t0, t1)) continue;
        if (!first) first = &s;
        last = &s;
    }
    rep.lp_v_linf_x = norm_lp_v_linf_x(*first, spec.beta, spec.p);
    rep.l1x_linfv = norm_l1x_linfv(*first);
    const auto F = to_distribution(*last);
    rep.defect = defects(F);
    rep.entropy = entropy_functional(F);
    return rep;
}

} // namespace softboltz
