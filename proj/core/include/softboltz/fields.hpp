#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "softboltz/phase_space.hpp"

namespace softboltz {

using GridPtr = std::shared_ptr<const VelocityGrid>;

/// Values over (cell, velocity node), cell-major.
class LatticeField {
public:
    LatticeField(GridPtr grid, SpatialDomain domain, double time = 0.0);

    const VelocityGrid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const SpatialDomain& domain() const noexcept { return domain_; }
    double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }

    std::size_t cells() const noexcept { return domain_.cell_count(); }
    std::size_t velocities() const noexcept { return grid_->size(); }

    double& at(std::size_t cell, std::size_t v) noexcept { return values_[cell * velocities() + v]; }
    double at(std::size_t cell, std::size_t v) const noexcept { return values_[cell * velocities() + v]; }
    std::span<double> cell(std::size_t c) noexcept { return {values_.data() + c * velocities(), velocities()}; }
    std::span<const double> cell(std::size_t c) const noexcept {
        return {values_.data() + c * velocities(), velocities()};
    }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool compatible(const LatticeField& o) const noexcept;
    /// Throws InputError unless `o` lives on the same grids.
    void require_compatible(const LatticeField& o) const;
    bool all_finite() const noexcept;

private:
    GridPtr grid_;
    SpatialDomain domain_;
    double time_;
    std::vector<double> values_;
};

/// F(t, x, v).
class DistributionField : public LatticeField {
public:
    using LatticeField::LatticeField;
    static DistributionField maxwellian(GridPtr grid, SpatialDomain domain);
    double min_value() const noexcept;
};

/// f = (F - mu) / sqrt(mu).
class PerturbationField : public LatticeField {
public:
    using LatticeField::LatticeField;
    /// f / sqrt(mu) = F / mu - 1 on one cell.
    std::vector<double> ratio(std::size_t cell) const;
};

PerturbationField to_perturbation(const DistributionField& F);
DistributionField to_distribution(const PerturbationField& f);

/// Time-ordered slices of a perturbation on [t_0, t_S].
struct Trajectory {
    std::vector<PerturbationField> slices;

    std::size_t size() const noexcept { return slices.size(); }
    bool empty() const noexcept { return slices.empty(); }
    const PerturbationField& front() const { return slices.front(); }
    const PerturbationField& back() const { return slices.back(); }
    std::vector<double> times() const;
};

} // namespace softboltz
