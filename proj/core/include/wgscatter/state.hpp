#pragma once

#include <complex>

#include <Eigen/Dense>

#include "wgscatter/grid.hpp"

namespace wgscatter {

using Complex = std::complex<double>;

// Two-excitation wavefunction in continuum normalization: amp_gg holds the
// symmetric two-photon amplitude C^g(k, k') over flat mode pairs, amp_e the
// one-photon-plus-excited-emitter amplitude C^e(k). Discrete sums stand in for
// integrals with weight dk per mode index.
//
// The full N x N matrix is stored; exchange symmetry is an invariant that the
// builders and the integrator maintain, not a storage trick.
struct TwoExcitationState {
    Eigen::MatrixXcd amp_gg;
    Eigen::VectorXcd amp_e;
    double time = 0.0;

    static TwoExcitationState zeros(const Grid& grid);

    Eigen::Index modes() const noexcept { return amp_e.size(); }
};

// Single-excitation sector: one photon over modes, or the excited emitter.
struct SingleExcitationState {
    Eigen::VectorXcd photon;
    Complex emitter{0.0, 0.0};
    double time = 0.0;

    static SingleExcitationState zeros(const Grid& grid);
};

// dk^2 sum |C^g|^2 + dk sum |C^e|^2
double norm(const TwoExcitationState& s, const Grid& grid);
// dk sum |c|^2 + |c_e|^2
double norm(const SingleExcitationState& s, const Grid& grid);

// max |C^g(i,j) - C^g(j,i)|
double symmetry_defect(const TwoExcitationState& s);

// Maps every mode (b, kappa) to (mirror(b), kappa), i.e. z -> -z in real space.
TwoExcitationState mirror_state(const TwoExcitationState& s, const Grid& grid);
SingleExcitationState mirror_state(const SingleExcitationState& s, const Grid& grid);

// Largest elementwise |a - b| over both amplitude blocks.
double max_abs_difference(const TwoExcitationState& a, const TwoExcitationState& b);

}  // namespace wgscatter
