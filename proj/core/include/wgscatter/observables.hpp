#pragma once

#include <vector>

#include "wgscatter/grid.hpp"
#include "wgscatter/state.hpp"
#include "wgscatter/trajectory.hpp"

namespace wgscatter {

// Sampling of real space for density and wavepacket views.
struct ZGrid {
    double z_min = -20.0;
    double z_max = 20.0;
    std::size_t n_z = 401;
    // Add the k0 carrier phases and let the two branches interfere. Without
    // it the branches are summed incoherently (fringes unresolved).
    bool include_cross_branch = false;
    double k0 = 0.0;

    void validate() const;
    double dz() const { return (z_max - z_min) / static_cast<double>(n_z - 1); }
    std::vector<double> positions() const;

    bool operator==(const ZGrid&) const = default;
};

struct DirectionalCounts {
    double N_R = 0.0;
    double N_L = 0.0;
};

struct Transmissions {
    double T_R = 0.0;
    double T_L = 0.0;
};

struct SectorProbabilities {
    double P_RR = 0.0;
    double P_LL = 0.0;
    double P_LR = 0.0;
    // Emitter excitation at evaluation time; the sector split is only the
    // scattering outcome once this has decayed.
    double P_e = 0.0;
    bool long_time_reached = true;
};

struct BellFidelities {
    double F_plus = 0.0;
    double F_minus = 0.0;
};

inline constexpr double kLongTimeThreshold = 1e-3;

double excitation_probability(const TwoExcitationState& s, const Grid& grid);
double excitation_probability(const SingleExcitationState& s);

// P_e, N_R, N_L and the norm in one pass, stamped with the state's time.
SeriesSample sample_observables(const TwoExcitationState& s, const Grid& grid);
SeriesSample sample_observables(const SingleExcitationState& s, const Grid& grid);

// N_R = 2 int_{k>0} dk int dk' |C^g|^2 + int_{k>0} dk |C^e|^2, N_L likewise.
DirectionalCounts directional_counts(const TwoExcitationState& s, const Grid& grid);
// Photon probability per branch in the single-excitation sector.
DirectionalCounts directional_counts(const SingleExcitationState& s, const Grid& grid);

Transmissions transmissions(const TwoExcitationState& s, const Grid& grid);

SectorProbabilities sector_probabilities(const TwoExcitationState& s, const Grid& grid,
                                         double long_time_threshold = kLongTimeThreshold);

// Overlaps with (|LL> +- |RR>)/sqrt(2), where |LL> is the normalized LL block
// of the state itself and |RR> its mirror image. Returns (0, 0) when the LL
// block vanishes.
BellFidelities bell_fidelities(const TwoExcitationState& s, const Grid& grid);

// N(z) from direct discrete Fourier sums over the mode grid. The result is
// only meaningful for |z| well inside half the recurrence length 2 pi / dk.
std::vector<double> photon_density(const TwoExcitationState& s, const Grid& grid, const ZGrid& zg);
std::vector<double> photon_density(const SingleExcitationState& s, const Grid& grid, const ZGrid& zg);

// beta(z, z') split into its four branch blocks (first index, second index).
// Block XY is the transform of C^g restricted to X-going k and Y-going k'.
struct RealSpaceWavepacket {
    std::vector<double> z;
    Eigen::MatrixXcd LL, LR, RL, RR;

    // sqrt(sum over blocks |beta_XY|^2): |beta(z,z')| with unresolved carrier fringes.
    Eigen::MatrixXd magnitude() const;
    // Coherent sum with carrier phases exp(+-i k0 z) restored.
    Eigen::MatrixXcd coherent(double k0) const;
};

RealSpaceWavepacket real_space_wavepacket(const TwoExcitationState& s, const Grid& grid, const ZGrid& zg);

double max_excitation(const Trajectory& traj);
double max_excitation(const SingleTrajectory& traj);

struct ScatterReport {
    double T_R = 0.0;
    double T_L = 0.0;
    double P_RR = 0.0;
    double P_LL = 0.0;
    double P_LR = 0.0;
    double P_e_max = 0.0;
    double F_plus = 0.0;
    double F_minus = 0.0;
    double residual_P_e = 0.0;
    bool long_time_reached = true;
};

ScatterReport make_scatter_report(const Trajectory& traj, const Grid& grid,
                                  double long_time_threshold = kLongTimeThreshold);

}  // namespace wgscatter
