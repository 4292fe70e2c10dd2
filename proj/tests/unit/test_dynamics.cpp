#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "wgscatter/dynamics.hpp"
#include "wgscatter/errors.hpp"
#include "wgscatter/observables.hpp"
#include "wgscatter/wavepackets.hpp"

using namespace wgscatter;
using testutil::analytic_params;
using testutil::params_with;

namespace {

// <psi|dpsi> + c.c. with the continuum weights.
double norm_rate(const TwoExcitationState& s, const TwoExcitationState& d, const Grid& g) {
    const double w = g.dk();
    return 2.0 * (w * w * (s.amp_gg.conjugate().cwiseProduct(d.amp_gg)).sum().real() +
                  w * s.amp_e.dot(d.amp_e).real());
}

TwoExcitationState axpy(Complex a, const TwoExcitationState& x, const TwoExcitationState& y) {
    TwoExcitationState r = y;
    r.amp_gg += a * x.amp_gg;
    r.amp_e += a * x.amp_e;
    return r;
}

}  // namespace

TEST_CASE("vacuum is a fixed point of the two-excitation equations") {
    const Grid g = Grid::build(11, 2.0);
    const auto d = rhs_two_excitation(TwoExcitationState::zeros(g), g, analytic_params());
    CHECK(d.amp_gg.norm() == 0.0);
    CHECK(d.amp_e.norm() == 0.0);
}

TEST_CASE("emitter source term is symmetric and matches the closed form") {
    const Grid g = Grid::build(11, 2.0);
    const auto p = analytic_params();
    auto s = TwoExcitationState::zeros(g);
    for (Eigen::Index i = 0; i < s.modes(); ++i) s.amp_e(i) = Complex(0.1 * i, 1.0 - 0.05 * i);
    const auto d = rhs_two_excitation(s, g, p);
    const Complex f(0.0, -p.coupling / std::sqrt(2.0));
    for (Eigen::Index i = 0; i < s.modes(); ++i) {
        for (Eigen::Index j = 0; j < s.modes(); ++j) {
            CHECK(std::abs(d.amp_gg(i, j) - f * (s.amp_e(i) + s.amp_e(j))) < 1e-15);
            CHECK(d.amp_gg(i, j) == d.amp_gg(j, i));
        }
        CHECK(std::abs(d.amp_e(i) - Complex(0, -detuning(g, p, static_cast<std::size_t>(i))) * s.amp_e(i)) < 1e-15);
    }
}

TEST_CASE("single-excitation right-hand side") {
    const Grid g = Grid::build(11, 2.0);
    const auto p = analytic_params();
    const auto e = build_excited_emitter_state(g);
    const auto d = rhs_single_excitation(e, g, p);
    for (Eigen::Index i = 0; i < d.photon.size(); ++i) CHECK(std::abs(d.photon(i) - Complex(0, -p.coupling)) < 1e-16);
    CHECK(d.emitter == Complex(0.0, 0.0));

    auto s = SingleExcitationState::zeros(g);
    for (Eigen::Index i = 0; i < s.photon.size(); ++i) s.photon(i) = Complex(1.0, 0.1 * i);
    const auto free = rhs_single_excitation(s, g, params_with(0.0));
    for (Eigen::Index i = 0; i < s.photon.size(); ++i)
        CHECK(std::abs(free.photon(i) - Complex(0, -detuning(g, p, static_cast<std::size_t>(i))) * s.photon(i)) <
              1e-15);
    CHECK(free.emitter == Complex(0.0, 0.0));
}

TEST_CASE("the generator is anti-Hermitian: norm is stationary") {
    const Grid g = Grid::build(31, 5.0);
    const auto p = analytic_params();
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto s = testutil::random_state(g, seed);
        CHECK(std::abs(norm_rate(s, rhs_two_excitation(s, g, p), g)) <= 1e-12);
    }
    SingleExcitationState s = SingleExcitationState::zeros(g);
    for (Eigen::Index i = 0; i < s.photon.size(); ++i) s.photon(i) = Complex(std::sin(i), std::cos(3.0 * i));
    s.emitter = {0.3, -0.7};
    const auto d = rhs_single_excitation(s, g, p);
    const double rate = 2.0 * (g.dk() * s.photon.dot(d.photon).real() + (std::conj(s.emitter) * d.emitter).real());
    CHECK(std::abs(rate) <= 1e-12);
}

TEST_CASE("fused stepper equals textbook RK4 on the reference right-hand side") {
    const Grid g = Grid::build(21, 4.0);
    const auto p = analytic_params();
    const auto s = testutil::random_state(g, 11);
    const double dt = 0.05;
    const auto k1 = rhs_two_excitation(s, g, p);
    const auto k2 = rhs_two_excitation(axpy(dt / 2, k1, s), g, p);
    const auto k3 = rhs_two_excitation(axpy(dt / 2, k2, s), g, p);
    const auto k4 = rhs_two_excitation(axpy(dt, k3, s), g, p);
    auto expect = axpy(dt / 6, k1, s);
    expect = axpy(dt / 3, k2, expect);
    expect = axpy(dt / 3, k3, expect);
    expect = axpy(dt / 6, k4, expect);

    auto got = s;
    TwoExcitationStepper(g, p).step(got, dt);
    CHECK(max_abs_difference(got, expect) < 1e-13);
    CHECK(got.time == doctest::Approx(dt));
    CHECK(symmetry_defect(got) == 0.0);
}

TEST_CASE("output is bitwise independent of the worker count") {
    const Grid g = Grid::build(41, 5.0);
    const auto p = analytic_params();
    PulseSpec a;
    a.z0 = -3.0;
    const auto s0 = build_two_photon_state({a, a, CorrelationWidth::uncorrelated()}, g, p);
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 2.0;
    const auto one = evolve(s0, cfg, g, p);
    cfg.workers = 3;
    const auto three = evolve(s0, cfg, g, p);
    CHECK(max_abs_difference(one.final_state, three.final_state) == 0.0);
}

TEST_CASE("decoupled emitter: pure phase evolution") {
    const Grid g = Grid::build(41, 5.0);
    const auto p = params_with(0.0);
    const auto s0 = testutil::random_state(g, 5);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    const auto traj = evolve(s0, cfg, g, p);
    const auto& s = traj.final_state;
    // Each mode is multiplied by the RK4 stability polynomial per step, which
    // approximates exp(-i w dt) to fifth order.
    const std::size_t steps = step_count(cfg);
    auto rk4 = [&](double w) {
        const Complex z(0.0, -w * cfg.dt);
        return std::pow(1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0, static_cast<int>(steps));
    };
    double err_rk4 = 0.0, err_exact = 0.0;
    for (Eigen::Index i = 0; i < s.modes(); ++i) {
        const double wi = detuning(g, p, static_cast<std::size_t>(i));
        err_rk4 = std::max(err_rk4, std::abs(s.amp_e(i) - rk4(wi) * s0.amp_e(i)));
        err_exact = std::max(err_exact, std::abs(s.amp_e(i) - std::exp(Complex(0, -wi)) * s0.amp_e(i)));
        for (Eigen::Index j = 0; j < s.modes(); ++j) {
            const double wj = detuning(g, p, static_cast<std::size_t>(j));
            err_rk4 = std::max(err_rk4, std::abs(s.amp_gg(i, j) - rk4(wi + wj) * s0.amp_gg(i, j)));
            err_exact =
                std::max(err_exact, std::abs(s.amp_gg(i, j) - std::exp(Complex(0, -(wi + wj))) * s0.amp_gg(i, j)));
        }
    }
    CHECK(err_rk4 < 1e-13);
    CHECK(err_exact < 1e-6);
}

TEST_CASE("free pulse translates at the group velocity") {
    const Grid g = Grid::build(201, 10.0);
    const auto p = params_with(0.0);
    PulseSpec a;
    a.z0 = -3.0;
    const auto s0 = build_single_photon_state(a, g, p);
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 5.0;
    const auto traj = evolve(s0, cfg, g, p);
    ZGrid zg;
    zg.z_min = -15.0;
    zg.z_max = 15.0;
    zg.n_z = 601;
    const auto z = zg.positions();
    auto centroid = [&](const SingleExcitationState& s) {
        const auto n = photon_density(s, g, zg);
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i) {
            m0 += n[i];
            m1 += n[i] * z[i];
        }
        return m1 / m0;
    };
    CHECK(centroid(s0) == doctest::Approx(-3.0).epsilon(1e-6));
    CHECK(centroid(traj.final_state) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("mirror covariance") {
    const Grid g = Grid::build(41, 8.0);
    const auto p = analytic_params();
    PulseSpec a;
    a.z0 = -2.0;
    PulseSpec b;
    b.sigma = 1.5;
    b.z0 = 4.0;
    b.direction = Branch::LeftGoing;
    const auto s0 = build_two_photon_state({a, b, CorrelationWidth::uncorrelated()}, g, p);
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 3.0;
    const auto direct = evolve(s0, cfg, g, p).final_state;
    const auto mirrored = evolve(mirror_state(s0, g), cfg, g, p).final_state;
    CHECK(max_abs_difference(mirror_state(direct, g), mirrored) < 1e-12);
}

TEST_CASE("evolution is linear") {
    const Grid g = Grid::build(21, 4.0);
    const auto p = analytic_params();
    const auto s1 = testutil::random_state(g, 21);
    const auto s2 = testutil::random_state(g, 22);
    const Complex a(0.6, 0.2), b(-0.3, 0.7);
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    const auto e1 = evolve(s1, cfg, g, p).final_state;
    const auto e2 = evolve(s2, cfg, g, p).final_state;
    auto mix = s1;
    mix.amp_gg = a * s1.amp_gg + b * s2.amp_gg;
    mix.amp_e = a * s1.amp_e + b * s2.amp_e;
    const auto em = evolve(mix, cfg, g, p).final_state;
    auto lin = e1;
    lin.amp_gg = a * e1.amp_gg + b * e2.amp_gg;
    lin.amp_e = a * e1.amp_e + b * e2.amp_e;
    CHECK(max_abs_difference(em, lin) < 1e-12);
}

TEST_CASE("stability guard and config validation") {
    const Grid g = Grid::build(101, 10.0);
    const auto p = analytic_params();
    IntegratorConfig cfg;
    cfg.dt = 0.06;  // 0.06 * 10 > 0.5
    try {
        cfg.validate(g, p);
        FAIL("expected FieldError");
    } catch (const FieldError& e) {
        CHECK(e.field() == "integrator.dt");
    }
    const auto s0 = build_excited_emitter_state(g);
    CHECK_THROWS_AS(evolve(s0, cfg, g, p), FieldError);
    cfg.dt = 0.05;
    CHECK_NOTHROW(cfg.validate(g, p));
    cfg.checkpoint_times = {1.0, 20.0};
    CHECK_THROWS_AS(cfg.validate(g, p), FieldError);
    cfg.checkpoint_times = {2.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(g, p), FieldError);
    CHECK(default_time_step(g, p) * 10.0 <= kStabilityGuard);
}

TEST_CASE("step count lands exactly on t_end and checkpoints snap to steps") {
    IntegratorConfig cfg;
    cfg.dt = 0.03;
    cfg.t_end = 1.0;
    CHECK(step_count(cfg) == 34);
    cfg.dt = 0.025;
    CHECK(step_count(cfg) == 40);

    const Grid g = Grid::build(21, 4.0);
    cfg.checkpoint_times = {0.0, 0.51, 1.0};
    const auto traj = evolve(build_excited_emitter_state(g), cfg, g, analytic_params());
    REQUIRE(traj.checkpoints.size() == 3);
    CHECK(traj.checkpoints[0].time == 0.0);
    CHECK(traj.checkpoints[1].time == doctest::Approx(0.5));
    CHECK(traj.final_state.time == doctest::Approx(1.0));
    CHECK(traj.series.front().t == 0.0);
    CHECK(traj.series.back().t == doctest::Approx(1.0));
}

TEST_CASE("coincident pair populates every directional quadrant") {
    const Grid g = Grid::build(161, 8.0);
    const auto p = analytic_params();
    PulseSpec a;
    a.z0 = -3.0;
    IntegratorConfig cfg;
    cfg.dt = default_time_step(g, p);
    cfg.t_end = 10.0;
    const auto traj = evolve(build_two_photon_state({a, a, CorrelationWidth::uncorrelated()}, g, p), cfg, g, p);
    const auto sp = sector_probabilities(traj.final_state, g);
    CHECK(sp.P_RR > 0.05);
    CHECK(sp.P_LL > 0.01);
    CHECK(sp.P_LR > 0.05);
    double worst = 0.0;
    for (const auto& x : traj.series) worst = std::max(worst, std::abs(x.N_R + x.N_L + x.P_e - 2.0));
    CHECK(worst < 1e-6);
}

TEST_CASE("separated pulses scatter in two distinct events") {
    const Grid g = Grid::build(161, 8.0);
    const auto p = analytic_params();
    PulseSpec a;
    a.z0 = -3.0;
    PulseSpec b = a;
    b.z0 = -9.0;
    IntegratorConfig cfg;
    cfg.dt = default_time_step(g, p);
    cfg.t_end = 16.0;
    const auto traj = evolve(build_two_photon_state({a, b, CorrelationWidth::uncorrelated()}, g, p), cfg, g, p);
    // Local maxima of P_e(t) above a floor: one near t = 3, one near t = 9.
    std::vector<double> peaks;
    const auto& ser = traj.series;
    for (std::size_t i = 1; i + 1 < ser.size(); ++i)
        if (ser[i].P_e > 0.05 && ser[i].P_e >= ser[i - 1].P_e && ser[i].P_e > ser[i + 1].P_e) peaks.push_back(ser[i].t);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[1] - peaks[0] == doctest::Approx(6.0).epsilon(0.1));
}
