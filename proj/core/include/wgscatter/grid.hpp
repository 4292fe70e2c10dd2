#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace wgscatter {

enum class Branch { LeftGoing, RightGoing };

constexpr Branch mirror(Branch b) noexcept {
    return b == Branch::LeftGoing ? Branch::RightGoing : Branch::LeftGoing;
}

// +1 for right-going modes (k > 0), -1 for left-going (k < 0).
constexpr int propagation_sign(Branch b) noexcept { return b == Branch::RightGoing ? 1 : -1; }

const char* to_string(Branch b) noexcept;

// Emitter and waveguide constants. Internally everything runs in units where
// gamma = group_velocity = 1; coupling then carries units Gamma*(Gamma/v_g)^(1/2).
struct PhysicalParams {
    double gamma = 1.0;
    double group_velocity = 1.0;
    double coupling = 0.0;
    // Carrier wavenumber, only used to render cross-branch fringes in z-space.
    std::optional<double> k0;

    void validate() const;
    bool operator==(const PhysicalParams&) const = default;
};

// Per-branch detuning grid kappa = |k| - k0, uniform on [-kappa_max, kappa_max].
// Flat mode layout: 0..n-1 are LeftGoing, n..2n-1 are RightGoing, with the
// same kappa ordering in both halves.
class Grid {
public:
    static Grid build(std::size_t n_per_branch, double kappa_max);

    std::size_t n_per_branch() const noexcept { return n_; }
    std::size_t modes() const noexcept { return 2 * n_; }
    double kappa_max() const noexcept { return kappa_max_; }
    double dk() const noexcept { return dk_; }
    const std::vector<double>& kappas() const noexcept { return kappas_; }

    double kappa(std::size_t index_in_branch) const { return kappas_.at(index_in_branch); }
    double kappa_of_mode(std::size_t mode) const { return kappa(unflatten(mode).second); }
    Branch branch_of_mode(std::size_t mode) const { return unflatten(mode).first; }

    std::size_t flatten(Branch b, std::size_t index_in_branch) const;
    std::pair<Branch, std::size_t> unflatten(std::size_t mode) const;
    std::size_t mirror_mode(std::size_t mode) const;

    std::size_t branch_offset(Branch b) const noexcept { return b == Branch::LeftGoing ? 0 : n_; }

    // Length of the periodic box implied by the mode spacing; real-space
    // content must stay inside it for the discretization to represent an
    // infinite waveguide.
    double recurrence_length() const noexcept;

    bool operator==(const Grid&) const = default;

private:
    Grid(std::size_t n, double kappa_max);

    std::size_t n_;
    double kappa_max_;
    double dk_;
    std::vector<double> kappas_;
};

// Rotating-frame mode detuning under the linearized dispersion, v_g * kappa.
double detuning(const Grid& grid, const PhysicalParams& params, std::size_t mode);

// Detunings for all modes in flat order.
std::vector<double> detunings(const Grid& grid, const PhysicalParams& params);

}  // namespace wgscatter
