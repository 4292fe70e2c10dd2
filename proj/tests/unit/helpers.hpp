#pragma once

#include <complex>
#include <random>

#include "wgscatter/calibration.hpp"
#include "wgscatter/grid.hpp"
#include "wgscatter/state.hpp"

namespace testutil {

inline wgscatter::PhysicalParams params_with(double g) {
    wgscatter::PhysicalParams p;
    p.coupling = g;
    return p;
}

inline wgscatter::PhysicalParams analytic_params() { return params_with(wgscatter::analytic_coupling(1.0)); }

// A normalized, exchange-symmetric random state.
inline wgscatter::TwoExcitationState random_state(const wgscatter::Grid& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    auto s = wgscatter::TwoExcitationState::zeros(grid);
    const auto N = s.modes();
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const std::complex<double> v(n(rng), n(rng));
            s.amp_gg(i, j) = v;
            s.amp_gg(j, i) = v;
        }
        s.amp_e(i) = {n(rng), n(rng)};
    }
    const double scale = 1.0 / std::sqrt(wgscatter::norm(s, grid));
    s.amp_gg *= scale;
    s.amp_e *= scale;
    return s;
}

}  // namespace testutil
