#include "softboltz/fields.hpp"

#include <algorithm>
#include <cmath>

#include "softboltz/error.hpp"

namespace softboltz {

LatticeField::LatticeField(GridPtr grid, SpatialDomain domain, double time)
    : grid_(std::move(grid)), domain_(domain), time_(time) {
    if (!grid_) throw InputError("field needs a velocity grid");
    values_.assign(domain_.cell_count() * grid_->size(), 0.0);
}

bool LatticeField::compatible(const LatticeField& o) const noexcept {
    return grid_->same_as(*o.grid_) && domain_.same_as(o.domain_);
}

void LatticeField::require_compatible(const LatticeField& o) const {
    if (!compatible(o)) throw InputError("fields live on different grids");
}

bool LatticeField::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

DistributionField DistributionField::maxwellian(GridPtr grid, SpatialDomain domain) {
    DistributionField F(std::move(grid), domain);
    const auto mu = F.grid().maxwellian();
    for (std::size_t c = 0; c < F.cells(); ++c) std::copy(mu.begin(), mu.end(), F.cell(c).begin());
    return F;
}

double DistributionField::min_value() const noexcept {
    const auto v = values();
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

std::vector<double> PerturbationField::ratio(std::size_t c) const {
    const auto sq = grid().sqrt_maxwellian();
    const auto f = cell(c);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] / sq[i];
    return out;
}

PerturbationField to_perturbation(const DistributionField& F) {
    PerturbationField f(F.grid_ptr(), F.domain(), F.time());
    const auto mu = F.grid().maxwellian();
    const auto sq = F.grid().sqrt_maxwellian();
    for (std::size_t c = 0; c < F.cells(); ++c) {
        const auto src = F.cell(c);
        auto dst = f.cell(c);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - mu[i]) / sq[i];
    }
    return f;
}

DistributionField to_distribution(const PerturbationField& f) {
    DistributionField F(f.grid_ptr(), f.domain(), f.time());
    const auto mu = f.grid().maxwellian();
    const auto sq = f.grid().sqrt_maxwellian();
    for (std::size_t c = 0; c < f.cells(); ++c) {
        const auto src = f.cell(c);
        auto dst = F.cell(c);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = mu[i] + sq[i] * src[i];
    }
    return F;
}

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    t.reserve(slices.size());
    for (const auto& s : slices) t.push_back(s.time());
    return t;
}

} // namespace softboltz
