#include "wgscatter/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wgscatter/errors.hpp"
#include "wgscatter/observables.hpp"

namespace wgscatter {

namespace {

using Eigen::Index;

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Plain real arithmetic for the hot loops; std::complex operator* goes
// through the NaN-recovering __muldc3 path.
struct Cplx {
    double re;
    double im;
};

inline Cplx load(const Complex& z) { return {z.real(), z.imag()}; }
inline Cplx mul(Cplx a, Cplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

enum StageKind { kFirst = 0, kMiddle = 1, kLast = 2 };

struct StageBuffers {
    const Complex* x_gg;
    const Complex* x_e;
    Complex* next_gg;  // null on the last stage
    Complex* next_e;
};

}  // namespace

void IntegratorConfig::validate(const Grid& grid, const PhysicalParams& params) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw FieldError("integrator.dt", "must be positive and finite");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw FieldError("integrator.t_end", "must be non-negative");
    const double spectral_radius = params.group_velocity * grid.kappa_max();
    if (dt * spectral_radius > kStabilityGuard) {
        std::ostringstream os;
        os << "dt * max|detuning| = " << dt * spectral_radius << " exceeds the stability guard " << kStabilityGuard
           << "; use dt <= " << kStabilityGuard / spectral_radius;
        throw FieldError("integrator.dt", os.str());
    }
    double previous = -1.0;
    for (double t : checkpoint_times) {
        if (!(t >= 0.0) || !(t <= t_end))
            throw FieldError("integrator.checkpoints", "time " + std::to_string(t) + " outside [0, t_end]");
        if (!(t > previous)) throw FieldError("integrator.checkpoints", "times must be strictly increasing");
        previous = t;
    }
    if (observable_stride < 1) throw FieldError("integrator.observable_stride", "must be at least 1");
    if (workers < 1) throw FieldError("integrator.workers", "must be at least 1");
}

Eigen::VectorXcd uniform_coupling(const Grid& grid, double g) {
    return Eigen::VectorXcd::Constant(static_cast<Index>(grid.modes()), Complex(g, 0.0));
}

double default_time_step(const Grid& grid, const PhysicalParams& params) {
    return 0.5 * kStabilityGuard / (params.group_velocity * grid.kappa_max());
}

std::size_t step_count(const IntegratorConfig& cfg) {
    if (cfg.t_end <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt * (1.0 - 1e-12)));
}

// ---------------------------------------------------------------------------
// Right-hand sides (reference, allocation per call)

TwoExcitationState rhs_two_excitation(const TwoExcitationState& s, const Grid& grid, const PhysicalParams& params) {
    const auto n = static_cast<Index>(grid.modes());
    if (s.amp_gg.rows() != n || s.amp_gg.cols() != n || s.amp_e.size() != n)
        throw std::invalid_argument("state does not match grid");
    const auto w = detunings(grid, params);
    const Complex g(params.coupling, 0.0);
    const Complex minus_i(0.0, -1.0);
    const double dk = grid.dk();

    TwoExcitationState d = TwoExcitationState::zeros(grid);
    d.time = s.time;
    for (Index j = 0; j < n; ++j) {
        const auto col = s.amp_gg.col(j);
        d.amp_e[j] = minus_i * (w[static_cast<std::size_t>(j)] * s.amp_e[j]) +
                     minus_i * (std::numbers::sqrt2 * dk * g * col.sum());
        for (Index i = 0; i < n; ++i) {
            const double wsum = w[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(j)];
            d.amp_gg(i, j) = minus_i * (wsum * s.amp_gg(i, j)) +
                             minus_i * (kInvSqrt2 * (std::conj(g) * s.amp_e[j] + std::conj(g) * s.amp_e[i]));
        }
    }
    return d;
}

SingleExcitationState rhs_single_excitation(const SingleExcitationState& s, const Grid& grid,
                                            const PhysicalParams& params) {
    return SingleExcitationStepper(grid, params).derivative(s);
}

// ---------------------------------------------------------------------------
// Two-excitation stepper

TwoExcitationStepper::TwoExcitationStepper(const Grid& grid, const PhysicalParams& params, int workers)
    : TwoExcitationStepper(grid, params, uniform_coupling(grid, params.coupling), workers) {}

TwoExcitationStepper::TwoExcitationStepper(const Grid& grid, const PhysicalParams& params,
                                           Eigen::VectorXcd couplings, int workers)
    : detuning_(detunings(grid, params)),
      coupling_(std::move(couplings)),
      dk_(grid.dk()),
      workers_(std::max(1, workers)) {
    const auto n = static_cast<Index>(grid.modes());
    if (coupling_.size() != n) throw std::invalid_argument("coupling vector does not match grid");
    coupling_conj_ = coupling_.conjugate();
    acc_ = {Eigen::MatrixXcd(n, n), Eigen::VectorXcd(n)};
    xa_ = {Eigen::MatrixXcd(n, n), Eigen::VectorXcd(n)};
    xb_ = {Eigen::MatrixXcd(n, n), Eigen::VectorXcd(n)};
}

namespace {

// One RK4 stage as a single pass over the columns of the stage input X:
//   k = f(X);  first:  acc  = w k,  next = y + a k
//              middle: acc += w k,  next = y + a k
//              last:   y = y + a (acc + w k)
// Column j of C^g yields both the C^e(j) derivative (via symmetry, the sum
// over k' of row j equals the sum over column j) and the column of dC^g.
// Every entry (i, j) is computed with an expression symmetric under i <-> j
// so exchange symmetry survives bit for bit.
void run_stage(const StageBuffers& b, TwoExcitationState& y, Complex* acc_gg, Complex* acc_e,
               const std::vector<double>& detuning, const Eigen::VectorXcd& coupling,
               const Eigen::VectorXcd& coupling_conj, double dk, double a, double w, StageKind kind, int workers) {
    const Index n = y.amp_gg.rows();
    Complex* y_gg = y.amp_gg.data();
    Complex* y_e = y.amp_e.data();
    const Complex* g = coupling.data();
    const Complex* gc = coupling_conj.data();
    const double* om = detuning.data();
    const double e_scale = std::numbers::sqrt2 * dk;

#pragma omp parallel for schedule(static) num_threads(workers)
    for (Index j = 0; j < n; ++j) {
        const Complex* col = b.x_gg + j * n;
        double sr = 0.0, si = 0.0;
        for (Index i = 0; i < n; ++i) {
            const Cplx p = mul(load(g[i]), load(col[i]));
            sr += p.re;
            si += p.im;
        }
        const Cplx ej = load(b.x_e[j]);
        const Cplx gcj = load(gc[j]);
        const double wj = om[j];

        // dC^e(j) = -i [w_j C^e_j + sqrt2 dk sum_i g_i C^g(i, j)]
        {
            const double zr = wj * ej.re + e_scale * sr;
            const double zi = wj * ej.im + e_scale * si;
            const Complex de(zi, -zr);
            switch (kind) {
                case kFirst:
                    acc_e[j] = w * de;
                    b.next_e[j] = y_e[j] + a * de;
                    break;
                case kMiddle:
                    acc_e[j] += w * de;
                    b.next_e[j] = y_e[j] + a * de;
                    break;
                case kLast:
                    y_e[j] = y_e[j] + a * (acc_e[j] + w * de);
                    break;
            }
        }

        Complex* acc_col = acc_gg + j * n;
        Complex* y_col = y_gg + j * n;
        Complex* next_col = b.next_gg ? b.next_gg + j * n : nullptr;
        for (Index i = 0; i < n; ++i) {
            const Cplx x = load(col[i]);
            const double wsum = om[i] + wj;
            const Cplx p = mul(load(gc[i]), ej);
            const Cplx q = mul(gcj, load(b.x_e[i]));
            const double zr = wsum * x.re + kInvSqrt2 * (p.re + q.re);
            const double zi = wsum * x.im + kInvSqrt2 * (p.im + q.im);
            const Complex d(zi, -zr);
            switch (kind) {
                case kFirst:
                    acc_col[i] = w * d;
                    next_col[i] = y_col[i] + a * d;
                    break;
                case kMiddle:
                    acc_col[i] += w * d;
                    next_col[i] = y_col[i] + a * d;
                    break;
                case kLast:
                    y_col[i] = y_col[i] + a * (acc_col[i] + w * d);
                    break;
            }
        }
    }
}

}  // namespace

void TwoExcitationStepper::step(TwoExcitationState& s, double dt) {
    const Index n = s.amp_gg.rows();
    if (n != acc_.gg.rows() || s.amp_e.size() != n) throw std::invalid_argument("state does not match stepper grid");

    // The first stage reads y while writing only acc/xa, so y doubles as X.
    run_stage({s.amp_gg.data(), s.amp_e.data(), xa_.gg.data(), xa_.e.data()}, s, acc_.gg.data(), acc_.e.data(),
              detuning_, coupling_, coupling_conj_, dk_, 0.5 * dt, 1.0 / 6.0, kFirst, workers_);
    run_stage({xa_.gg.data(), xa_.e.data(), xb_.gg.data(), xb_.e.data()}, s, acc_.gg.data(), acc_.e.data(),
              detuning_, coupling_, coupling_conj_, dk_, 0.5 * dt, 1.0 / 3.0, kMiddle, workers_);
    run_stage({xb_.gg.data(), xb_.e.data(), xa_.gg.data(), xa_.e.data()}, s, acc_.gg.data(), acc_.e.data(),
              detuning_, coupling_, coupling_conj_, dk_, dt, 1.0 / 3.0, kMiddle, workers_);
    // C^e must be read from X while y_e is overwritten, and X is xa here, so
    // the last stage is safe column by column.
    run_stage({xa_.gg.data(), xa_.e.data(), nullptr, nullptr}, s, acc_.gg.data(), acc_.e.data(), detuning_,
              coupling_, coupling_conj_, dk_, dt, 1.0 / 6.0, kLast, workers_);
    s.time += dt;
}

// ---------------------------------------------------------------------------
// Single-excitation stepper

SingleExcitationStepper::SingleExcitationStepper(const Grid& grid, const PhysicalParams& params)
    : SingleExcitationStepper(grid, params, uniform_coupling(grid, params.coupling)) {}

SingleExcitationStepper::SingleExcitationStepper(const Grid& grid, const PhysicalParams& params,
                                                 Eigen::VectorXcd couplings)
    : coupling_(std::move(couplings)), dk_(grid.dk()) {
    const auto w = detunings(grid, params);
    detuning_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Index>(w.size()));
    if (coupling_.size() != detuning_.size()) throw std::invalid_argument("coupling vector does not match grid");
}

SingleExcitationState SingleExcitationStepper::derivative(const SingleExcitationState& s) const {
    const Complex minus_i(0.0, -1.0);
    SingleExcitationState d;
    d.time = s.time;
    d.emitter = minus_i * dk_ * coupling_.cwiseProduct(s.photon).sum();
    d.photon = minus_i * (detuning_.cast<Complex>().cwiseProduct(s.photon) + coupling_.conjugate() * s.emitter);
    return d;
}

void SingleExcitationStepper::step(SingleExcitationState& s, double dt) {
    const auto k1 = derivative(s);
    SingleExcitationState tmp{s.photon + 0.5 * dt * k1.photon, s.emitter + 0.5 * dt * k1.emitter, s.time};
    const auto k2 = derivative(tmp);
    tmp.photon = s.photon + 0.5 * dt * k2.photon;
    tmp.emitter = s.emitter + 0.5 * dt * k2.emitter;
    const auto k3 = derivative(tmp);
    tmp.photon = s.photon + dt * k3.photon;
    tmp.emitter = s.emitter + dt * k3.emitter;
    const auto k4 = derivative(tmp);
    s.photon += (dt / 6.0) * (k1.photon + 2.0 * k2.photon + 2.0 * k3.photon + k4.photon);
    s.emitter += (dt / 6.0) * (k1.emitter + 2.0 * k2.emitter + 2.0 * k3.emitter + k4.emitter);
    s.time += dt;
}

// ---------------------------------------------------------------------------
// Time loop

namespace {

template <typename State, typename Stepper, typename Observer>
BasicTrajectory<State> run_loop(const State& s0, const IntegratorConfig& cfg, const Grid& grid, Stepper& stepper,
                                const Observer& observer) {
    BasicTrajectory<State> traj;
    const std::size_t steps = step_count(cfg);
    const double dt = steps == 0 ? 0.0 : cfg.t_end / static_cast<double>(steps);
    traj.dt_used = dt;
    traj.steps = steps;

    std::vector<std::size_t> checkpoint_steps;
    for (double t : cfg.checkpoint_times)
        checkpoint_steps.push_back(dt > 0.0 ? static_cast<std::size_t>(std::llround(t / dt)) : 0);
    auto next_checkpoint = checkpoint_steps.begin();

    State y = s0;
    const double t0 = s0.time;
    for (std::size_t k = 0;; ++k) {
        y.time = t0 + static_cast<double>(k) * dt;
        if (k % cfg.observable_stride == 0 || k == steps) traj.series.push_back(sample_observables(y, grid));
        // Several requested times can round to the same step; keep times increasing.
        while (next_checkpoint != checkpoint_steps.end() && *next_checkpoint == k) {
            if (traj.checkpoints.empty() || traj.checkpoints.back().time < y.time) traj.checkpoints.push_back(y);
            ++next_checkpoint;
        }
        if (observer) observer(y, k);
        if (k == steps) break;
        stepper.step(y, dt);
    }
    traj.final_state = std::move(y);
    return traj;
}

}  // namespace

Trajectory evolve(const TwoExcitationState& s0, const IntegratorConfig& cfg, const Grid& grid,
                  const PhysicalParams& params, const StepObserver& observer) {
    params.validate();
    cfg.validate(grid, params);
    const auto n = static_cast<Index>(grid.modes());
    if (s0.amp_gg.rows() != n || s0.amp_gg.cols() != n || s0.amp_e.size() != n)
        throw std::invalid_argument("initial state does not match grid");
    const double scale = std::max(1.0, s0.amp_gg.cwiseAbs().maxCoeff());
    if (symmetry_defect(s0) > 1e-12 * scale)
        throw NumericalError("initial two-photon amplitude is not exchange symmetric");
    TwoExcitationStepper stepper(grid, params, cfg.workers);
    return run_loop(s0, cfg, grid, stepper, observer);
}

SingleTrajectory evolve(const SingleExcitationState& s0, const IntegratorConfig& cfg, const Grid& grid,
                        const PhysicalParams& params, const SingleStepObserver& observer) {
    params.validate();
    cfg.validate(grid, params);
    if (s0.photon.size() != static_cast<Index>(grid.modes()))
        throw std::invalid_argument("initial state does not match grid");
    SingleExcitationStepper stepper(grid, params);
    return run_loop(s0, cfg, grid, stepper, observer);
}

}  // namespace wgscatter
