#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "softboltz/collision.hpp"
#include "softboltz/fields.hpp"

namespace softboltz {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

enum class WeightMode { theorem, exploratory };
WeightMode parse_weight_mode(const std::string& s);
std::string to_string(WeightMode mode);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Weight exponent and Lebesgue exponents. q = 0 means "unset".
struct WeightSpec {
    double beta = 37.0;
    double p = 4.0;
    double q = 0.0;
    WeightMode mode = WeightMode::theorem;

    /// Hoelder conjugate of p; 1 for p = inf.
    double p_conj() const noexcept;
    /// r = p - (p - q) / (4 q).
    double r() const;
    /// Lower bound on p for the given gamma (the max of the four thresholds).
    static double p_threshold(double gamma) noexcept;
    /// Strict lower bound on beta for the given gamma and p.
    static double beta_threshold(double gamma, double p) noexcept;
    /// True iff p and beta satisfy the strict thresholds (and q, if set, lies in (3/(3+gamma), p)).
    bool admissible(double gamma) const noexcept;
    /// Throws InputError on malformed exponents; in theorem mode also when not admissible.
    void validate(double gamma) const;
};

/// (1 + |v|^2)^{beta/2}.
double weight(const Vec3& v, double beta) noexcept;

/// { sum_v h^3 [ max_{t in window} max_x |w f| ]^p }^{1/p}; overall max for p = inf.
/// Slices with time in [t0, t1] (closed, with a 1e-12 slack) form the window.
double norm_lp_v_linf_window(const Trajectory& f, double beta, double p, double t0, double t1);
double norm_lp_v_linf_window(const Trajectory& f, double beta, double p);
/// Same norm for a single slice.
double norm_lp_v_linf_x(const PerturbationField& f, double beta, double p);
/// int_x sup_v |f| dx.
double norm_l1x_linfv(const PerturbationField& f);
/// max_t max_x sum_v h^3 |f|.
double norm_linf_t_linf_x_l1v(const Trajectory& f, double t0, double t1);
double norm_linf_t_linf_x_l1v(const Trajectory& f);

struct Defects {
    double mass = 0.0;
    Vec3 momentum{};
    double energy = 0.0;
};
/// Phase-space integrals of (F - mu) {1, v, |v|^2}.
Defects defects(const DistributionField& F);

/// iint mu [(1 + phi) log(1 + phi) - phi] with phi = (F - mu)/mu, the
/// rearrangement of iint (F log F - mu log mu) + (3/2 log 2pi - 1) M0 + E0/2
/// that avoids cancelling large logarithms. F/mu below 1e-300 is clipped
/// inside the log only. Throws InputError when no node carries mass.
double entropy_functional(const DistributionField& F);

struct Lemma24Gap {
    double lhs = 0.0;
    double rhs = 0.0;
};
/// lhs = iint [(F-mu)^2/mu 1{|F-mu| <= mu} + |F-mu| 1{|F-mu| > mu}], rhs = 4 E(F0).
Lemma24Gap lemma24_gap(const DistributionField& F, const DistributionField& F0);

/// Both sides of the Gamma-/Gamma+ product inequalities over one window.
struct Lemma41Report {
    double lhs_minus = 0.0;
    double rhs_minus = 0.0;
    double lhs_plus = 0.0;
    double rhs_plus = 0.0;
    /// NaN when both sides vanish.
    double ratio_minus() const noexcept;
    double ratio_plus() const noexcept;
    /// rhs = 0 while lhs > 1e-300.
    bool violation() const noexcept;
};
Lemma41Report lemma41_check(const CollisionEngine& engine, const Trajectory& f, const WeightSpec& spec, double t0,
                            double t1);
/// One Gamma evaluation shared by several weight specs.
std::vector<Lemma41Report> lemma41_check(const CollisionEngine& engine, const Trajectory& f,
                                         std::span<const WeightSpec> specs, double t0, double t1);

/// Exponents of the two product inequalities and their sums.
struct ExponentIdentities {
    double minus_weighted;   // 1 + p(q-1)/(q(p-1))
    double minus_l1;         // (p-q)/(q(p-1))
    double plus_weighted;    // (1/q - 1/p)/8 + 1 + r/p
    double plus_l1;          // (1/q - 1/p)/8
    double minus_sum;        // minus_weighted + minus_l1, = 2
    double plus_sum_rp;      // 2 (1/q - 1/p)/8 + 1 + r/p, = 2
    double plus_sum_rq;      // 2 (1/q - 1/p)/8 + 1 + r/q, = 2 only when p = q
};
ExponentIdentities exponent_identities(double p, double q);

/// Norms and conserved quantities of one window.
struct NormReport {
    double lp_v_linf_t_linf_x = 0.0;
    double lp_v_linf_x = 0.0;
    double l1x_linfv = 0.0;
    double linf_t_linf_x_l1v = 0.0;
    Defects defect;
    double entropy = 0.0;
    WeightMode mode = WeightMode::theorem;

    /// key: value lines.
    std::string to_text() const;
    static std::string csv_header();
    std::string csv_row() const;
};

/// Window [t0, t1] of `f`; the initial-data norms use the first slice of
/// the window and the defects/entropy the last.
NormReport norm_report(const Trajectory& f, const WeightSpec& spec, double t0, double t1);

} // namespace softboltz
