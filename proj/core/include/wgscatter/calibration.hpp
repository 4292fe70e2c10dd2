#pragma once

#include <vector>

#include "wgscatter/grid.hpp"

namespace wgscatter {

// Golden-rule coupling for an emitter radiating into both branches:
// Gamma = 2 * 2 pi g^2 / (2 pi v_g)  =>  g = sqrt(Gamma v_g / (4 pi)).
double analytic_coupling(double gamma, double group_velocity = 1.0);

struct DecayFit {
    // Least-squares fit ln P_e = ln(amplitude) - rate * t over the window.
    double rate = 0.0;
    double amplitude = 0.0;
    // RMS residual of that log-linear fit; large values mean non-exponential decay.
    double rms_log_residual = 0.0;
    // |rate / target - 1|.
    double rate_error = 0.0;
    // max |P_e(t) e^{gamma t} - 1| over the window, against the target rate.
    // Diagnostic only: a truncated band gives amplitude ~ 1 + 2 / (pi kappa_max).
    double max_relative_deviation = 0.0;
    std::size_t samples = 0;
};

struct CalibrationOptions {
    double fit_t_min = 0.5;
    double fit_t_max = 3.0;
    // Root-finding stops once |rate / target - 1| falls below this.
    double rate_tolerance = 1e-9;
    int max_iterations = 60;
    // Acceptance of the final decay curve.
    double max_rate_error = 0.01;
    double max_rms_log_residual = 1e-2;
    // 0 selects a step from the grid.
    double dt = 0.0;
};

struct CalibrationResult {
    double coupling = 0.0;
    double initial_guess = 0.0;
    DecayFit fit;
    int iterations = 0;
};

DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& p_e, double t_min,
                               double t_max, double target_rate);

// Evolves the initially excited emitter with params.coupling and fits its decay.
DecayFit measure_emitter_decay(const Grid& grid, const PhysicalParams& params, double target_rate,
                               const CalibrationOptions& opts = {});

// Finds g such that the excited emitter on this grid decays at gamma_target,
// starting from the analytic guess and iterating g <- g sqrt(target / rate).
// Throws NumericalError for an under-resolved grid, non-convergence, or a
// decay curve that is not exponential within the options' thresholds.
CalibrationResult calibrate_coupling(double gamma_target, const Grid& grid, const PhysicalParams& base,
                                     const CalibrationOptions& opts = {});

}  // namespace wgscatter
