#include "wgscatter/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wgscatter/errors.hpp"

namespace wgscatter {

namespace {

using Eigen::Index;

// F(j, z) = dk / sqrt(2 pi) * exp(i s kappa_j z) for the kappa samples of one branch.
Eigen::MatrixXcd branch_fourier_kernel(const Grid& grid, Branch b, const std::vector<double>& z) {
    const auto n = static_cast<Index>(grid.n_per_branch());
    const auto nz = static_cast<Index>(z.size());
    const double s = propagation_sign(b);
    const double w = grid.dk() / std::sqrt(2.0 * std::numbers::pi);
    Eigen::MatrixXcd f(n, nz);
    for (Index c = 0; c < nz; ++c)
        for (Index j = 0; j < n; ++j) f(j, c) = std::polar(w, s * grid.kappa(static_cast<std::size_t>(j)) * z[c]);
    return f;
}

// Accumulates |e^{ik0 z} a_R + e^{-ik0 z} a_L|^2 or |a_R|^2 + |a_L|^2 per z column.
void add_branch_intensity(const Eigen::MatrixXcd& a_left, const Eigen::MatrixXcd& a_right, const ZGrid& zg,
                          const std::vector<double>& z, double weight, std::vector<double>& out) {
    for (Index c = 0; c < a_left.cols(); ++c) {
        double sum = 0.0;
        if (zg.include_cross_branch) {
            const Complex pr = std::polar(1.0, zg.k0 * z[c]);
            const Complex pl = std::conj(pr);
            for (Index r = 0; r < a_left.rows(); ++r) sum += std::norm(pr * a_right(r, c) + pl * a_left(r, c));
        } else {
            for (Index r = 0; r < a_left.rows(); ++r) sum += std::norm(a_right(r, c)) + std::norm(a_left(r, c));
        }
        out[static_cast<std::size_t>(c)] += weight * sum;
    }
}

}  // namespace

void ZGrid::validate() const {
    if (!(z_min < z_max) || !std::isfinite(z_min) || !std::isfinite(z_max))
        throw FieldError("output.z_min", "z_min must be finite and below z_max");
    if (n_z < 2) throw FieldError("output.n_z", "need at least 2 samples");
    if (!std::isfinite(k0)) throw FieldError("physics.k0", "must be finite");
}

std::vector<double> ZGrid::positions() const {
    std::vector<double> z(n_z);
    const double step = dz();
    for (std::size_t i = 0; i < n_z; ++i) z[i] = z_min + step * static_cast<double>(i);
    z.back() = z_max;
    return z;
}

double excitation_probability(const TwoExcitationState& s, const Grid& grid) {
    return grid.dk() * s.amp_e.squaredNorm();
}

double excitation_probability(const SingleExcitationState& s) { return std::norm(s.emitter); }

DirectionalCounts directional_counts(const TwoExcitationState& s, const Grid& grid) {
    const auto n = static_cast<Index>(grid.n_per_branch());
    const double dk = grid.dk();
    // Rows of C^g indexed by the first photon; the matrix is symmetric so the
    // column blocks give the same numbers.
    const double gg_left = s.amp_gg.leftCols(n).squaredNorm();
    const double gg_right = s.amp_gg.rightCols(n).squaredNorm();
    const double e_left = s.amp_e.head(n).squaredNorm();
    const double e_right = s.amp_e.tail(n).squaredNorm();
    return {2.0 * dk * dk * gg_right + dk * e_right, 2.0 * dk * dk * gg_left + dk * e_left};
}

DirectionalCounts directional_counts(const SingleExcitationState& s, const Grid& grid) {
    const auto n = static_cast<Index>(grid.n_per_branch());
    return {grid.dk() * s.photon.tail(n).squaredNorm(), grid.dk() * s.photon.head(n).squaredNorm()};
}

SeriesSample sample_observables(const TwoExcitationState& s, const Grid& grid) {
    const auto n = static_cast<Index>(grid.n_per_branch());
    const double dk = grid.dk();
    const double gg_left = s.amp_gg.leftCols(n).squaredNorm();
    const double gg_right = s.amp_gg.rightCols(n).squaredNorm();
    const double e_left = dk * s.amp_e.head(n).squaredNorm();
    const double e_right = dk * s.amp_e.tail(n).squaredNorm();
    SeriesSample out;
    out.t = s.time;
    out.P_e = e_left + e_right;
    out.N_R = 2.0 * dk * dk * gg_right + e_right;
    out.N_L = 2.0 * dk * dk * gg_left + e_left;
    out.norm = dk * dk * (gg_left + gg_right) + out.P_e;
    return out;
}

SeriesSample sample_observables(const SingleExcitationState& s, const Grid& grid) {
    const auto c = directional_counts(s, grid);
    SeriesSample out;
    out.t = s.time;
    out.P_e = std::norm(s.emitter);
    out.N_R = c.N_R;
    out.N_L = c.N_L;
    out.norm = c.N_R + c.N_L + out.P_e;
    return out;
}

Transmissions transmissions(const TwoExcitationState& s, const Grid& grid) {
    const auto c = directional_counts(s, grid);
    return {0.5 * c.N_R, 0.5 * c.N_L};
}

SectorProbabilities sector_probabilities(const TwoExcitationState& s, const Grid& grid,
                                         double long_time_threshold) {
    const auto n = static_cast<Index>(grid.n_per_branch());
    const double w = grid.dk() * grid.dk();
    SectorProbabilities p;
    p.P_LL = w * s.amp_gg.topLeftCorner(n, n).squaredNorm();
    p.P_RR = w * s.amp_gg.bottomRightCorner(n, n).squaredNorm();
    p.P_LR = w * (s.amp_gg.topRightCorner(n, n).squaredNorm() + s.amp_gg.bottomLeftCorner(n, n).squaredNorm());
    p.P_e = excitation_probability(s, grid);
    p.long_time_reached = p.P_e <= long_time_threshold;
    return p;
}

BellFidelities bell_fidelities(const TwoExcitationState& s, const Grid& grid) {
    const auto n = static_cast<Index>(grid.n_per_branch());
    const double w = grid.dk() * grid.dk();
    const auto ll = s.amp_gg.topLeftCorner(n, n);
    const auto rr = s.amp_gg.bottomRightCorner(n, n);
    const double ll_norm = std::sqrt(w * ll.squaredNorm());
    if (ll_norm == 0.0) return {};
    // <mirror(psi_LL), psi_RR>: mirroring keeps the kappa indices and swaps branches.
    const Complex cross = w * ll.cwiseProduct(rr.conjugate()).sum();
    const Complex overlap = std::conj(cross);
    const Complex plus = (ll_norm + overlap / ll_norm) / std::numbers::sqrt2;
    const Complex minus = (ll_norm - overlap / ll_norm) / std::numbers::sqrt2;
    return {std::norm(plus), std::norm(minus)};
}

std::vector<double> photon_density(const TwoExcitationState& s, const Grid& grid, const ZGrid& zg) {
    zg.validate();
    const auto z = zg.positions();
    const auto n = static_cast<Index>(grid.n_per_branch());
    const auto fl = branch_fourier_kernel(grid, Branch::LeftGoing, z);
    const auto fr = branch_fourier_kernel(grid, Branch::RightGoing, z);

    std::vector<double> out(z.size(), 0.0);
    // Two-photon term: inner transform over k', outer integral over k.
    const Eigen::MatrixXcd gl = s.amp_gg.leftCols(n) * fl;
    const Eigen::MatrixXcd gr = s.amp_gg.rightCols(n) * fr;
    add_branch_intensity(gl, gr, zg, z, 2.0 * grid.dk(), out);

    const Eigen::MatrixXcd el = s.amp_e.head(n).transpose() * fl;
    const Eigen::MatrixXcd er = s.amp_e.tail(n).transpose() * fr;
    add_branch_intensity(el, er, zg, z, 1.0, out);
    return out;
}

std::vector<double> photon_density(const SingleExcitationState& s, const Grid& grid, const ZGrid& zg) {
    zg.validate();
    const auto z = zg.positions();
    const auto n = static_cast<Index>(grid.n_per_branch());
    const Eigen::MatrixXcd pl = s.photon.head(n).transpose() * branch_fourier_kernel(grid, Branch::LeftGoing, z);
    const Eigen::MatrixXcd pr = s.photon.tail(n).transpose() * branch_fourier_kernel(grid, Branch::RightGoing, z);
    std::vector<double> out(z.size(), 0.0);
    add_branch_intensity(pl, pr, zg, z, 1.0, out);
    return out;
}

Eigen::MatrixXd RealSpaceWavepacket::magnitude() const {
    return (LL.cwiseAbs2() + LR.cwiseAbs2() + RL.cwiseAbs2() + RR.cwiseAbs2()).cwiseSqrt();
}

Eigen::MatrixXcd RealSpaceWavepacket::coherent(double k0) const {
    const auto nz = static_cast<Index>(z.size());
    Eigen::VectorXcd right(nz);
    for (Index i = 0; i < nz; ++i) right[i] = std::polar(1.0, k0 * z[static_cast<std::size_t>(i)]);
    const Eigen::VectorXcd left = right.conjugate();
    return left.asDiagonal() * LL * left.asDiagonal() + left.asDiagonal() * LR * right.asDiagonal() +
           right.asDiagonal() * RL * left.asDiagonal() + right.asDiagonal() * RR * right.asDiagonal();
}

RealSpaceWavepacket real_space_wavepacket(const TwoExcitationState& s, const Grid& grid, const ZGrid& zg) {
    zg.validate();
    RealSpaceWavepacket out;
    out.z = zg.positions();
    const auto n = static_cast<Index>(grid.n_per_branch());
    const auto fl = branch_fourier_kernel(grid, Branch::LeftGoing, out.z);
    const auto fr = branch_fourier_kernel(grid, Branch::RightGoing, out.z);
    // beta_XY(z, z') = sum_jk F_X(j, z) C_XY(j, k) F_Y(k, z'); the 1/(2 pi) sits in the kernels.
    out.LL = fl.transpose() * s.amp_gg.topLeftCorner(n, n) * fl;
    out.LR = fl.transpose() * s.amp_gg.topRightCorner(n, n) * fr;
    out.RL = fr.transpose() * s.amp_gg.bottomLeftCorner(n, n) * fl;
    out.RR = fr.transpose() * s.amp_gg.bottomRightCorner(n, n) * fr;
    return out;
}

double max_excitation(const Trajectory& traj) {
    double m = 0.0;
    for (const auto& s : traj.series) m = std::max(m, s.P_e);
    return m;
}

double max_excitation(const SingleTrajectory& traj) {
    double m = 0.0;
    for (const auto& s : traj.series) m = std::max(m, s.P_e);
    return m;
}

ScatterReport make_scatter_report(const Trajectory& traj, const Grid& grid, double long_time_threshold) {
    const auto& s = traj.final_state;
    const auto t = transmissions(s, grid);
    const auto p = sector_probabilities(s, grid, long_time_threshold);
    const auto f = bell_fidelities(s, grid);
    ScatterReport r;
    r.T_R = t.T_R;
    r.T_L = t.T_L;
    r.P_RR = p.P_RR;
    r.P_LL = p.P_LL;
    r.P_LR = p.P_LR;
    r.P_e_max = max_excitation(traj);
    r.F_plus = f.F_plus;
    r.F_minus = f.F_minus;
    r.residual_P_e = p.P_e;
    r.long_time_reached = p.long_time_reached;
    return r;
}

}  // namespace wgscatter
