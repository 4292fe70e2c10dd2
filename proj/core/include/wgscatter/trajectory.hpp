#pragma once

#include <vector>

#include "wgscatter/state.hpp"

namespace wgscatter {

// Scalar observables sampled along a run.
struct SeriesSample {
    double t = 0.0;
    double P_e = 0.0;
    double N_R = 0.0;
    double N_L = 0.0;
    double norm = 0.0;
};

template <typename State>
struct BasicTrajectory {
    std::vector<State> checkpoints;
    std::vector<SeriesSample> series;
    State final_state;
    double dt_used = 0.0;
    std::size_t steps = 0;
};

using Trajectory = BasicTrajectory<TwoExcitationState>;
using SingleTrajectory = BasicTrajectory<SingleExcitationState>;

}  // namespace wgscatter
