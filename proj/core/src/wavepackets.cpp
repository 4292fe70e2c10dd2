#include "wgscatter/wavepackets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "wgscatter/errors.hpp"

namespace wgscatter {

namespace {

struct Profiles {
    Eigen::VectorXcd xi1;
    Eigen::VectorXcd xi2;
};

// Unnormalized symmetrized amplitude beta0(k,k') + beta0(k',k).
Eigen::MatrixXcd symmetrized_product(const TwoPhotonInputSpec& spec, const Grid& grid,
                                     const PhysicalParams& params, const Profiles& pr) {
    const auto n = static_cast<Eigen::Index>(grid.modes());
    Eigen::MatrixXcd beta(n, n);
    // f takes the summed momentum offset (k - k_p1) + (k' - k_p2). On a branch
    // with sign s, k - k_p = s (kappa - carrier), so the offset is
    // s_i kappa_i + s_j kappa_j - (s1 c1 + s2 c2): symmetric in (i, j).
    const double carriers = propagation_sign(spec.pulse1.direction) * spec.pulse1.carrier_kappa(params) +
                            propagation_sign(spec.pulse2.direction) * spec.pulse2.carrier_kappa(params);
    std::vector<double> k(grid.modes());
    for (std::size_t m = 0; m < grid.modes(); ++m)
        k[m] = propagation_sign(grid.branch_of_mode(m)) * grid.kappa_of_mode(m);

    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double f = phase_matching_factor(k[i] + k[j] - carriers, spec.sigma_p);
            const Complex v = f * (pr.xi1[i] * pr.xi2[j] + pr.xi1[j] * pr.xi2[i]);
            beta(i, j) = v;
            beta(j, i) = v;
        }
    }
    return beta;
}

Profiles both_profiles(const TwoPhotonInputSpec& spec, const Grid& grid, const PhysicalParams& params,
                       double tol) {
    return {single_photon_profile(spec.pulse1, grid, params, tol),
            single_photon_profile(spec.pulse2, grid, params, tol)};
}

}  // namespace

void PulseSpec::validate(const char* field_prefix) const {
    const std::string pre(field_prefix);
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw FieldError(pre + ".sigma", "must be positive and finite");
    if (!std::isfinite(z0)) throw FieldError(pre + ".z0", "must be finite");
    if (!std::isfinite(delta)) throw FieldError(pre + ".delta", "must be finite");
    if (!allow_outgoing_start) {
        if (direction == Branch::RightGoing && !(z0 < 0.0))
            throw FieldError(pre + ".z0", "right-going pulse must start at z0 < 0 (set allow_outgoing_start to override)");
        if (direction == Branch::LeftGoing && !(z0 > 0.0))
            throw FieldError(pre + ".z0", "left-going pulse must start at z0 > 0 (set allow_outgoing_start to override)");
    }
}

CorrelationWidth CorrelationWidth::finite(double sigma_p) {
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p))
        throw FieldError("input.sigma_p", "must be positive and finite (use the uncorrelated value for infinity)");
    CorrelationWidth w;
    w.value_ = sigma_p;
    return w;
}

double out_of_window_mass(const PulseSpec& p, const Grid& grid, const PhysicalParams& params) {
    // |xi|^2 is a normal density with standard deviation sigma / sqrt(2).
    const double c = p.carrier_kappa(params);
    const double km = grid.kappa_max();
    return 0.5 * std::erfc((km - c) / p.sigma) + 0.5 * std::erfc((km + c) / p.sigma);
}

Eigen::VectorXcd single_photon_profile(const PulseSpec& p, const Grid& grid, const PhysicalParams& params,
                                       double coverage_tolerance) {
    if (!(p.sigma > 0.0)) throw FieldError("pulse.sigma", "must be positive");
    const double outside = out_of_window_mass(p, grid, params);
    if (outside > coverage_tolerance) {
        std::ostringstream os;
        os << "pulse (sigma=" << p.sigma << ", delta=" << p.delta << ") not covered by detuning window +-"
           << grid.kappa_max() << ": out-of-window mass " << outside << " exceeds " << coverage_tolerance;
        throw CoverageError(os.str(), outside);
    }

    const double c = p.carrier_kappa(params);
    const double s = propagation_sign(p.direction);
    const double prefactor = 1.0 / std::sqrt(p.sigma * std::sqrt(std::numbers::pi));
    Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.modes()));
    const std::size_t off = grid.branch_offset(p.direction);
    for (std::size_t i = 0; i < grid.n_per_branch(); ++i) {
        const double q = grid.kappa(i) - c;
        const double envelope = prefactor * std::exp(-q * q / (2.0 * p.sigma * p.sigma));
        xi[static_cast<Eigen::Index>(off + i)] = std::polar(envelope, -p.z0 * s * q);
    }
    const double discrete = grid.dk() * xi.squaredNorm();
    if (!(discrete > 0.0)) throw NumericalError("single-photon profile has zero norm on this grid");
    xi /= std::sqrt(discrete);
    return xi;
}

double phase_matching_factor(double ksum, CorrelationWidth sigma_p) {
    if (sigma_p.is_uncorrelated()) return 1.0;
    const double w = sigma_p.value();
    return std::exp(-ksum * ksum / (2.0 * w * w));
}

double two_photon_normalization(const TwoPhotonInputSpec& spec, const Grid& grid, const PhysicalParams& params) {
    const auto beta = symmetrized_product(spec, grid, params, both_profiles(spec, grid, params, 1.0));
    const double raw = grid.dk() * grid.dk() * beta.squaredNorm();
    if (!(raw > 0.0)) throw NumericalError("two-photon input has zero norm on this grid");
    return 1.0 / std::sqrt(raw);
}

TwoExcitationState build_two_photon_state(const TwoPhotonInputSpec& spec, const Grid& grid,
                                          const PhysicalParams& params, double coverage_tolerance) {
    const auto profiles = both_profiles(spec, grid, params, coverage_tolerance);
    TwoExcitationState s = TwoExcitationState::zeros(grid);
    s.amp_gg = symmetrized_product(spec, grid, params, profiles);
    const double raw = grid.dk() * grid.dk() * s.amp_gg.squaredNorm();
    if (!(raw > 0.0) || !std::isfinite(raw))
        throw NumericalError("two-photon input is not normalizable on this grid (norm " + std::to_string(raw) + ")");
    s.amp_gg *= 1.0 / std::sqrt(raw);
    return s;
}

SingleExcitationState build_single_photon_state(const PulseSpec& p, const Grid& grid, const PhysicalParams& params,
                                                double coverage_tolerance) {
    SingleExcitationState s;
    s.photon = single_photon_profile(p, grid, params, coverage_tolerance);
    return s;
}

SingleExcitationState build_excited_emitter_state(const Grid& grid) {
    auto s = SingleExcitationState::zeros(grid);
    s.emitter = {1.0, 0.0};
    return s;
}

}  // namespace wgscatter

namespace wgscatter {

double auto_start_distance(double sigma) { return std::max(3.0, 5.0 / sigma); }

double auto_end_time(double start_distance, double sigma, double gamma, double group_velocity) {
    return (start_distance + 5.0 / sigma) / group_velocity + 12.0 / gamma;
}

double required_recurrence_length(double t_end, double start_distance, double sigma, double group_velocity) {
    // Leading tail of the outgoing light leaves the emitter at about
    // (start - 5/sigma)/v_g and must not come back around before t_end.
    return group_velocity * t_end - start_distance + 10.0 / sigma;
}

}  // namespace wgscatter
