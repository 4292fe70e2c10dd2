#pragma once

#include <vector>

#include "wgscatter/dynamics.hpp"
#include "wgscatter/grid.hpp"
#include "wgscatter/observables.hpp"
#include "wgscatter/wavepackets.hpp"

namespace wgscatter {

inline constexpr double kOracleResidualThreshold = 1e-4;

struct SinglePhotonResult {
    // Probability to keep the input direction (T) or reverse it (R).
    double T = 0.0;
    double R = 0.0;
    double residual_P_e = 0.0;
    std::vector<double> kappas;
    // |c(kappa)| on the input's own branch at t_end.
    std::vector<double> transmitted_spectrum;
};

// Time-domain single-photon scattering in the one-excitation sector.
// Throws NumericalError if the emitter still holds more than
// residual_threshold at t_end.
SinglePhotonResult single_photon_scatter(const PulseSpec& p, const Grid& grid, const PhysicalParams& params,
                                         const IntegratorConfig& cfg,
                                         double residual_threshold = kOracleResidualThreshold);

// Frequency-domain reference for an emitter coupled to both directions:
// t(dw) = dw / (dw + i gamma / 2), T = int |t|^2 |xi(kappa)|^2 dkappa over the
// continuum Gaussian (adaptive Gauss-Kronrod on the whole real line).
Complex lorentzian_transmission_amplitude(double detuning, double gamma);
double lorentzian_transmission(const PulseSpec& p, const PhysicalParams& params);

struct FactorizationReport {
    double separation = 0.0;
    SectorProbabilities two_photon;
    SinglePhotonResult first;
    SinglePhotonResult second;
    // Products of the single-photon outcomes.
    double expected_RR = 0.0;
    double expected_LL = 0.0;
    double expected_LR = 0.0;
    double max_deviation = 0.0;
};

// Runs the two-photon engine on an uncorrelated pair (leading pulse, plus a
// copy trailing by `separation`) and compares P_RR, P_LL, P_LR with T1 T2,
// R1 R2 and T1 R2 + R1 T2 from the single-photon engine on the same grid.
FactorizationReport factorization_check(const PulseSpec& leading, double separation, const Grid& grid,
                                        const PhysicalParams& params, const IntegratorConfig& cfg);

// Same with the leading pulse right-going, resonant, width sigma, at z0 = -3.
FactorizationReport factorization_check(double separation, double sigma, const Grid& grid,
                                        const PhysicalParams& params, const IntegratorConfig& cfg);

struct MonochromaticPoint {
    double sigma = 0.0;
    double T_simulated = 0.0;
    double T_oracle = 0.0;
    double residual_P_e = 0.0;
};

// Resonance transmission against pulse width, with automatic placement and
// duration per width. Rejects widths the grid cannot represent (spacing,
// window or recurrence length).
std::vector<MonochromaticPoint> monochromatic_limit_sweep(const std::vector<double>& sigmas, const Grid& grid,
                                                          const PhysicalParams& params, double dt,
                                                          double delta = 0.0);

bool strictly_increasing_transmission(const std::vector<MonochromaticPoint>& points);

}  // namespace wgscatter
