#include "wgscatter/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wgscatter/errors.hpp"

namespace wgscatter {

SinglePhotonResult single_photon_scatter(const PulseSpec& p, const Grid& grid, const PhysicalParams& params,
                                         const IntegratorConfig& cfg, double residual_threshold) {
    const auto traj = evolve(build_single_photon_state(p, grid, params), cfg, grid, params);
    const auto& s = traj.final_state;
    const auto counts = directional_counts(s, grid);

    SinglePhotonResult r;
    const bool right = p.direction == Branch::RightGoing;
    r.T = right ? counts.N_R : counts.N_L;
    r.R = right ? counts.N_L : counts.N_R;
    r.residual_P_e = excitation_probability(s);
    r.kappas = grid.kappas();
    const std::size_t off = grid.branch_offset(p.direction);
    r.transmitted_spectrum.resize(grid.n_per_branch());
    for (std::size_t i = 0; i < grid.n_per_branch(); ++i)
        r.transmitted_spectrum[i] = std::abs(s.photon[static_cast<Eigen::Index>(off + i)]);

    if (r.residual_P_e > residual_threshold) {
        std::ostringstream os;
        os << "long-time limit not reached: emitter excitation " << r.residual_P_e << " at t = " << s.time
           << " exceeds " << residual_threshold;
        throw NumericalError(os.str());
    }
    return r;
}

Complex lorentzian_transmission_amplitude(double detuning, double gamma) {
    return detuning / Complex(detuning, 0.5 * gamma);
}

double lorentzian_transmission(const PulseSpec& p, const PhysicalParams& params) {
    const double c = p.carrier_kappa(params);
    const double sigma = p.sigma;
    const double half = 0.5 * params.gamma;
    const double norm = 1.0 / (sigma * std::sqrt(std::numbers::pi));
    // Integrate the reflected fraction (smooth, positive) and subtract.
    auto reflected = [&](double kappa) {
        const double w = params.group_velocity * kappa;
        const double q = (kappa - c) / sigma;
        return half * half / (w * w + half * half) * norm * std::exp(-q * q);
    };
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    double err = 0.0;
    // Split at the resonance and the carrier so each piece is unimodal.
    const double a = std::min(0.0, c), b = std::max(0.0, c);
    double r = gauss_kronrod<double, 61>::integrate(reflected, -inf, a, 15, 1e-13, &err);
    if (b > a) r += gauss_kronrod<double, 61>::integrate(reflected, a, b, 15, 1e-13, &err);
    r += gauss_kronrod<double, 61>::integrate(reflected, b, inf, 15, 1e-13, &err);
    return 1.0 - r;
}

FactorizationReport factorization_check(const PulseSpec& leading, double separation, const Grid& grid,
                                        const PhysicalParams& params, const IntegratorConfig& cfg) {
    if (!(separation >= 0.0)) throw FieldError("separation", "must be non-negative");
    PulseSpec trailing = leading;
    trailing.z0 = leading.z0 - propagation_sign(leading.direction) * separation;

    TwoPhotonInputSpec spec{leading, trailing, CorrelationWidth::uncorrelated()};
    const auto traj = evolve(build_two_photon_state(spec, grid, params), cfg, grid, params);

    FactorizationReport rep;
    rep.separation = separation;
    rep.two_photon = sector_probabilities(traj.final_state, grid);
    rep.first = single_photon_scatter(leading, grid, params, cfg);
    rep.second = single_photon_scatter(trailing, grid, params, cfg);

    // Both photons share a direction, so "transmitted" maps to the same branch.
    const bool right = leading.direction == Branch::RightGoing;
    const double t1 = rep.first.T, r1 = rep.first.R, t2 = rep.second.T, r2 = rep.second.R;
    rep.expected_RR = right ? t1 * t2 : r1 * r2;
    rep.expected_LL = right ? r1 * r2 : t1 * t2;
    rep.expected_LR = t1 * r2 + r1 * t2;
    rep.max_deviation = std::max({std::abs(rep.two_photon.P_RR - rep.expected_RR),
                                  std::abs(rep.two_photon.P_LL - rep.expected_LL),
                                  std::abs(rep.two_photon.P_LR - rep.expected_LR)});
    return rep;
}

FactorizationReport factorization_check(double separation, double sigma, const Grid& grid,
                                        const PhysicalParams& params, const IntegratorConfig& cfg) {
    PulseSpec leading;
    leading.sigma = sigma;
    leading.z0 = -3.0;
    leading.direction = Branch::RightGoing;
    return factorization_check(leading, separation, grid, params, cfg);
}

std::vector<MonochromaticPoint> monochromatic_limit_sweep(const std::vector<double>& sigmas, const Grid& grid,
                                                          const PhysicalParams& params, double dt, double delta) {
    std::vector<MonochromaticPoint> out;
    for (double sigma : sigmas) {
        if (!(sigma > 0.0)) throw FieldError("sigma", "must be positive");
        if (sigma < 4.0 * grid.dk()) {
            std::ostringstream os;
            os << "sigma = " << sigma << " under-resolved by grid spacing dk = " << grid.dk();
            throw NumericalError(os.str());
        }
        PulseSpec p;
        p.sigma = sigma;
        p.delta = delta;
        const double start = auto_start_distance(sigma);
        p.z0 = -start;
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.t_end = auto_end_time(start, sigma, params.gamma, params.group_velocity);
        const double room = required_recurrence_length(cfg.t_end, start, sigma, params.group_velocity);
        if (grid.recurrence_length() < room) {
            std::ostringstream os;
            os << "sigma = " << sigma << " needs a recurrence length of " << room << " but 2 pi / dk = "
               << grid.recurrence_length();
            throw NumericalError(os.str());
        }
        const auto r = single_photon_scatter(p, grid, params, cfg);
        out.push_back({sigma, r.T, lorentzian_transmission(p, params), r.residual_P_e});
    }
    return out;
}

bool strictly_increasing_transmission(const std::vector<MonochromaticPoint>& points) {
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].sigma > points[i - 1].sigma && points[i].T_simulated > points[i - 1].T_simulated))
            return false;
    return true;
}

}  // namespace wgscatter
