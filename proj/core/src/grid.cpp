#include "wgscatter/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wgscatter/errors.hpp"

namespace wgscatter {

const char* to_string(Branch b) noexcept {
    return b == Branch::LeftGoing ? "left" : "right";
}

void PhysicalParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw FieldError("physics.gamma", "must be positive and finite");
    if (!(group_velocity > 0.0) || !std::isfinite(group_velocity))
        throw FieldError("physics.group_velocity", "must be positive and finite");
    if (!(coupling >= 0.0) || !std::isfinite(coupling))
        throw FieldError("physics.coupling", "must be non-negative and finite");
    if (k0 && !std::isfinite(*k0)) throw FieldError("physics.k0", "must be finite");
}

Grid::Grid(std::size_t n, double kappa_max)
    : n_(n), kappa_max_(kappa_max), dk_(2.0 * kappa_max / static_cast<double>(n - 1)), kappas_(n) {
    // Fill symmetrically so kappas[i] == -kappas[n-1-i] bit for bit.
    for (std::size_t i = 0; i < n; ++i) {
        const double centered = static_cast<double>(i) - 0.5 * static_cast<double>(n - 1);
        kappas_[i] = centered * dk_;
    }
    kappas_.front() = -kappa_max;
    kappas_.back() = kappa_max;
}

Grid Grid::build(std::size_t n_per_branch, double kappa_max) {
    if (n_per_branch < 2)
        throw FieldError("grid.n_per_branch", "must be at least 2, got " + std::to_string(n_per_branch));
    if (!(kappa_max > 0.0) || !std::isfinite(kappa_max))
        throw FieldError("grid.kappa_max", "must be positive and finite");
    return Grid(n_per_branch, kappa_max);
}

std::size_t Grid::flatten(Branch b, std::size_t index_in_branch) const {
    if (index_in_branch >= n_)
        throw std::out_of_range("kappa index " + std::to_string(index_in_branch) + " outside branch of size " +
                                std::to_string(n_));
    return branch_offset(b) + index_in_branch;
}

std::pair<Branch, std::size_t> Grid::unflatten(std::size_t mode) const {
    if (mode >= modes())
        throw std::out_of_range("mode " + std::to_string(mode) + " outside grid of " + std::to_string(modes()));
    if (mode < n_) return {Branch::LeftGoing, mode};
    return {Branch::RightGoing, mode - n_};
}

std::size_t Grid::mirror_mode(std::size_t mode) const {
    const auto [b, i] = unflatten(mode);
    return flatten(mirror(b), i);
}

double Grid::recurrence_length() const noexcept { return 2.0 * std::numbers::pi / dk_; }

double detuning(const Grid& grid, const PhysicalParams& params, std::size_t mode) {
    return params.group_velocity * grid.kappa_of_mode(mode);
}

std::vector<double> detunings(const Grid& grid, const PhysicalParams& params) {
    std::vector<double> out(grid.modes());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = params.group_velocity * grid.kappa_of_mode(m);
    return out;
}

}  // namespace wgscatter
