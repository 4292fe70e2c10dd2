#include "wgscatter/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wgscatter/dynamics.hpp"
#include "wgscatter/errors.hpp"
#include "wgscatter/wavepackets.hpp"

namespace wgscatter {

double analytic_coupling(double gamma, double group_velocity) {
    return std::sqrt(gamma * group_velocity / (4.0 * std::numbers::pi));
}

DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& p_e, double t_min,
                               double t_max, double target_rate) {
    if (t.size() != p_e.size()) throw std::invalid_argument("time and P_e series differ in length");
    double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::pair<double, double>> window;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_min || t[i] > t_max) continue;
        if (!(p_e[i] > 0.0)) throw NumericalError("emitter population vanished inside the fit window");
        const double y = std::log(p_e[i]);
        window.emplace_back(t[i], y);
        s += 1;
        sx += t[i];
        sy += y;
        sxx += t[i] * t[i];
        sxy += t[i] * y;
    }
    if (window.size() < 3) throw NumericalError("too few samples in the decay fit window");
    const double denom = s * sxx - sx * sx;
    const double slope = (s * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / s;

    DecayFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.samples = window.size();
    double ss = 0.0;
    for (const auto& [ti, yi] : window) {
        const double r = yi - (intercept + slope * ti);
        ss += r * r;
        fit.max_relative_deviation =
            std::max(fit.max_relative_deviation, std::abs(std::exp(yi + target_rate * ti) - 1.0));
    }
    fit.rms_log_residual = std::sqrt(ss / static_cast<double>(window.size()));
    fit.rate_error = std::abs(fit.rate / target_rate - 1.0);
    return fit;
}

namespace {

double calibration_step(const Grid& grid, const PhysicalParams& params, const CalibrationOptions& opts) {
    const double guard = default_time_step(grid, params);
    return opts.dt > 0.0 ? opts.dt : std::min(guard, 0.01);
}

void check_resolution(const Grid& grid, const PhysicalParams& params, double gamma) {
    // The emitter line has width gamma / v_g in kappa.
    const double line = gamma / params.group_velocity;
    std::ostringstream os;
    if (grid.dk() > 0.25 * line) {
        os << "grid spacing dk = " << grid.dk() << " does not resolve the emitter line (need dk <= " << 0.25 * line
           << ")";
        throw NumericalError(os.str());
    }
    if (grid.kappa_max() < line) {
        os << "detuning window +-" << grid.kappa_max() << " is narrower than the emitter line";
        throw NumericalError(os.str());
    }
}

}  // namespace

DecayFit measure_emitter_decay(const Grid& grid, const PhysicalParams& params, double target_rate,
                               const CalibrationOptions& opts) {
    IntegratorConfig cfg;
    cfg.dt = calibration_step(grid, params, opts);
    cfg.t_end = opts.fit_t_max;
    std::vector<double> t, p;
    const auto traj = evolve(build_excited_emitter_state(grid), cfg, grid, params);
    for (const auto& s : traj.series) {
        t.push_back(s.t);
        p.push_back(s.P_e);
    }
    return fit_exponential_decay(t, p, opts.fit_t_min, opts.fit_t_max, target_rate);
}

CalibrationResult calibrate_coupling(double gamma_target, const Grid& grid, const PhysicalParams& base,
                                     const CalibrationOptions& opts) {
    if (!(gamma_target > 0.0)) throw FieldError("physics.gamma", "calibration target must be positive");
    check_resolution(grid, base, gamma_target);

    CalibrationResult result;
    result.initial_guess = analytic_coupling(gamma_target, base.group_velocity);
    PhysicalParams params = base;
    params.coupling = result.initial_guess;

    for (int it = 1; it <= opts.max_iterations; ++it) {
        result.fit = measure_emitter_decay(grid, params, gamma_target, opts);
        result.iterations = it;
        result.coupling = params.coupling;
        if (!(result.fit.rate > 0.0)) throw NumericalError("emitter does not decay on this grid");
        const double ratio = gamma_target / result.fit.rate;
        if (std::abs(1.0 / ratio - 1.0) <= opts.rate_tolerance) break;
        if (it == opts.max_iterations) {
            std::ostringstream os;
            os << "coupling calibration did not converge in " << opts.max_iterations
               << " iterations (rate " << result.fit.rate << " vs target " << gamma_target << ")";
            throw NumericalError(os.str());
        }
        // Rate scales as g^2 to leading order.
        params.coupling *= std::sqrt(ratio);
    }

    if (result.fit.rms_log_residual > opts.max_rms_log_residual ||
        result.fit.rate_error > opts.max_rate_error) {
        std::ostringstream os;
        os << "non-exponential emitter decay on this grid (rms log residual " << result.fit.rms_log_residual
           << ", rate error " << result.fit.rate_error
           << "); widen the detuning window or refine the grid";
        throw NumericalError(os.str());
    }
    return result;
}

}  // namespace wgscatter
