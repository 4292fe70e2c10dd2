#include "wgscatter/state.hpp"

#include <stdexcept>

namespace wgscatter {

namespace {

void require_shape(const TwoExcitationState& s, const Grid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.modes());
    if (s.amp_gg.rows() != n || s.amp_gg.cols() != n || s.amp_e.size() != n)
        throw std::invalid_argument("two-excitation state does not match grid of " + std::to_string(n) +
                                    " modes");
}

// Flat permutation swapping the two branch halves.
Eigen::PermutationMatrix<Eigen::Dynamic> branch_swap(const Grid& grid) {
    Eigen::PermutationMatrix<Eigen::Dynamic> p(static_cast<Eigen::Index>(grid.modes()));
    for (std::size_t m = 0; m < grid.modes(); ++m)
        p.indices()[static_cast<Eigen::Index>(m)] = static_cast<int>(grid.mirror_mode(m));
    return p;
}

}  // namespace

TwoExcitationState TwoExcitationState::zeros(const Grid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.modes());
    return {Eigen::MatrixXcd::Zero(n, n), Eigen::VectorXcd::Zero(n), 0.0};
}

SingleExcitationState SingleExcitationState::zeros(const Grid& grid) {
    return {Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.modes())), {0.0, 0.0}, 0.0};
}

double norm(const TwoExcitationState& s, const Grid& grid) {
    require_shape(s, grid);
    const double dk = grid.dk();
    return dk * dk * s.amp_gg.squaredNorm() + dk * s.amp_e.squaredNorm();
}

double norm(const SingleExcitationState& s, const Grid& grid) {
    return grid.dk() * s.photon.squaredNorm() + std::norm(s.emitter);
}

double symmetry_defect(const TwoExcitationState& s) {
    return (s.amp_gg - s.amp_gg.transpose()).cwiseAbs().maxCoeff();
}

TwoExcitationState mirror_state(const TwoExcitationState& s, const Grid& grid) {
    require_shape(s, grid);
    const auto p = branch_swap(grid);
    TwoExcitationState out;
    out.amp_gg = p * s.amp_gg * p.transpose();
    out.amp_e = p * s.amp_e;
    out.time = s.time;
    return out;
}

SingleExcitationState mirror_state(const SingleExcitationState& s, const Grid& grid) {
    const auto p = branch_swap(grid);
    return {p * s.photon, s.emitter, s.time};
}

double max_abs_difference(const TwoExcitationState& a, const TwoExcitationState& b) {
    return std::max((a.amp_gg - b.amp_gg).cwiseAbs().maxCoeff(), (a.amp_e - b.amp_e).cwiseAbs().maxCoeff());
}

}  // namespace wgscatter
