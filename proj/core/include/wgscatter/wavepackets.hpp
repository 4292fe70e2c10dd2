#pragma once

#include <limits>
#include <optional>

#include "wgscatter/grid.hpp"
#include "wgscatter/state.hpp"

namespace wgscatter {

// Gaussian single-photon pulse. sigma is the spectral width (Gamma/v_g),
// z0 the initial centre (v_g/Gamma), delta the carrier detuning (Gamma).
struct PulseSpec {
    double sigma = 1.0;
    double z0 = -3.0;
    double delta = 0.0;
    Branch direction = Branch::RightGoing;
    // Permit a pulse that starts on the outgoing side of the emitter.
    bool allow_outgoing_start = false;

    // Carrier position on its branch, kappa = delta / v_g.
    double carrier_kappa(const PhysicalParams& params) const { return delta / params.group_velocity; }

    void validate(const char* field_prefix = "pulse") const;
    bool operator==(const PulseSpec&) const = default;
};

// Width of the phase-matching envelope. The uncorrelated case (sigma_p -> inf)
// is a distinct state, never a large float.
class CorrelationWidth {
public:
    static CorrelationWidth uncorrelated() noexcept { return CorrelationWidth{}; }
    static CorrelationWidth finite(double sigma_p);

    bool is_uncorrelated() const noexcept { return !value_; }
    // Throws std::bad_optional_access for the uncorrelated case.
    double value() const { return value_.value(); }

    bool operator==(const CorrelationWidth&) const = default;

private:
    CorrelationWidth() = default;
    std::optional<double> value_;
};

struct TwoPhotonInputSpec {
    PulseSpec pulse1;
    PulseSpec pulse2;
    CorrelationWidth sigma_p = CorrelationWidth::uncorrelated();

    bool operator==(const TwoPhotonInputSpec&) const = default;
};

inline constexpr double kDefaultCoverageTolerance = 1e-10;

// Continuum probability mass of |xi|^2 that lies outside [-kappa_max, kappa_max].
double out_of_window_mass(const PulseSpec& p, const Grid& grid, const PhysicalParams& params);

// xi(k) = sigma^-1/2 pi^-1/4 exp[-i z0 (k - k_p) - (k - k_p)^2 / (2 sigma^2)], written
// in branch coordinates where k - k_p = s (kappa - delta/v_g), s = +-1 by branch.
// Supported on the pulse's branch only and renormalized so dk sum |xi|^2 = 1.
Eigen::VectorXcd single_photon_profile(const PulseSpec& p, const Grid& grid, const PhysicalParams& params,
                                       double coverage_tolerance = kDefaultCoverageTolerance);

// f(ksum) = exp[-ksum^2 / (2 sigma_p^2)], exactly 1 when uncorrelated.
double phase_matching_factor(double ksum, CorrelationWidth sigma_p);

// beta(k, k') = K [beta0(k, k') + beta0(k', k)], beta0 = f(.) xi1(k) xi2(k').
// The phase-matching argument is the summed detuning from each carrier,
// (kappa1 - delta1/v_g) + (kappa2 - delta2/v_g), regardless of branch.
// K is fixed by the discrete normalization dk^2 sum |beta|^2 = 1.
TwoExcitationState build_two_photon_state(const TwoPhotonInputSpec& spec, const Grid& grid,
                                          const PhysicalParams& params,
                                          double coverage_tolerance = kDefaultCoverageTolerance);

// The normalization constant K actually applied by build_two_photon_state.
double two_photon_normalization(const TwoPhotonInputSpec& spec, const Grid& grid, const PhysicalParams& params);

SingleExcitationState build_single_photon_state(const PulseSpec& p, const Grid& grid, const PhysicalParams& params,
                                                double coverage_tolerance = kDefaultCoverageTolerance);

SingleExcitationState build_excited_emitter_state(const Grid& grid);

}  // namespace wgscatter

namespace wgscatter {

// Automatic pulse placement. A pulse of width sigma started this far from the
// emitter has intensity exp(-25) of its peak at the emitter.
double auto_start_distance(double sigma);

// Time for a pulse that starts `start_distance` away to pass the emitter and
// for the re-emitted excitation to decay below ~1e-4 (about 12 / gamma).
double auto_end_time(double start_distance, double sigma, double gamma = 1.0, double group_velocity = 1.0);

// Real-space room the run needs inside one recurrence length 2 pi / dk: the
// outgoing light must not wrap around to the emitter before t_end.
double required_recurrence_length(double t_end, double start_distance, double sigma, double group_velocity = 1.0);

}  // namespace wgscatter
