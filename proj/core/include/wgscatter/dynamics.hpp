#pragma once

#include <functional>
#include <vector>

#include "wgscatter/grid.hpp"
#include "wgscatter/state.hpp"
#include "wgscatter/trajectory.hpp"

namespace wgscatter {

// Explicit RK4 stability/accuracy guard: dt * max|detuning| must not exceed this.
inline constexpr double kStabilityGuard = 0.5;

struct IntegratorConfig {
    double dt = 0.0125;
    double t_end = 10.0;
    // Full states are captured at the step nearest to each time.
    std::vector<double> checkpoint_times;
    // Scalar observables are sampled every this many steps (and at the end).
    std::size_t observable_stride = 1;
    // Row-parallel workers for the two-excitation right-hand side. Output is
    // bitwise independent of this value.
    int workers = 1;

    void validate(const Grid& grid, const PhysicalParams& params) const;
    bool operator==(const IntegratorConfig&) const = default;
};

// Per-mode couplings g(k). The engine always works with a vector so that
// frequency-dependent coupling is an additive change.
Eigen::VectorXcd uniform_coupling(const Grid& grid, double g);

// dC^e(k) = -i dw(k) C^e(k) - i sqrt2 int dk' g(k') C^g(k, k')
// dC^g(k1,k2) = -i [dw(k1) + dw(k2)] C^g(k1,k2) - i/sqrt2 [g*(k1) C^e(k2) + g*(k2) C^e(k1)]
TwoExcitationState rhs_two_excitation(const TwoExcitationState& s, const Grid& grid, const PhysicalParams& params);

// dc_e = -i dk sum_k g(k) c(k);  dc(k) = -i dw(k) c(k) - i g*(k) c_e
SingleExcitationState rhs_single_excitation(const SingleExcitationState& s, const Grid& grid,
                                            const PhysicalParams& params);

// Fixed-step classic RK4 on the two-excitation equations, with scratch
// buffers reused across steps. Each stage is one fused pass over the matrix.
class TwoExcitationStepper {
public:
    TwoExcitationStepper(const Grid& grid, const PhysicalParams& params, int workers = 1);
    TwoExcitationStepper(const Grid& grid, const PhysicalParams& params, Eigen::VectorXcd couplings,
                         int workers = 1);

    void step(TwoExcitationState& s, double dt);

private:
    struct Buffers {
        Eigen::MatrixXcd gg;
        Eigen::VectorXcd e;
    };

    std::vector<double> detuning_;
    Eigen::VectorXcd coupling_;
    Eigen::VectorXcd coupling_conj_;
    double dk_;
    int workers_;
    Buffers acc_, xa_, xb_;
};

class SingleExcitationStepper {
public:
    SingleExcitationStepper(const Grid& grid, const PhysicalParams& params);
    SingleExcitationStepper(const Grid& grid, const PhysicalParams& params, Eigen::VectorXcd couplings);

    void step(SingleExcitationState& s, double dt);
    SingleExcitationState derivative(const SingleExcitationState& s) const;

private:
    Eigen::VectorXd detuning_;
    Eigen::VectorXcd coupling_;
    double dk_;
};

// Called after every step (and once at t = 0) with the current state and step index.
using StepObserver = std::function<void(const TwoExcitationState&, std::size_t step)>;
using SingleStepObserver = std::function<void(const SingleExcitationState&, std::size_t step)>;

// Number of fixed steps and the step actually used: the requested dt is
// shrunk so that an integer number of steps lands exactly on t_end.
std::size_t step_count(const IntegratorConfig& cfg);

Trajectory evolve(const TwoExcitationState& s0, const IntegratorConfig& cfg, const Grid& grid,
                  const PhysicalParams& params, const StepObserver& observer = {});

SingleTrajectory evolve(const SingleExcitationState& s0, const IntegratorConfig& cfg, const Grid& grid,
                        const PhysicalParams& params, const SingleStepObserver& observer = {});

// Default time step for a grid: half the stability guard.
double default_time_step(const Grid& grid, const PhysicalParams& params);

}  // namespace wgscatter
