// SPDX-License-Identifier: Apache-2.0
#include "bdris/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace bdris {

ReflectionMatrix diagonal_power_iteration(const SubcarrierChannel& chan, int iterations) {
    const int n = chan.num_elements();
    const Eigen::MatrixXcd abar =
        refinement_matrix(Eigen::MatrixXcd::Identity(n, n), chan);
    const PhaseIterationResult pr = power_iterate_phases(abar, iterations);
    return ReflectionMatrix::diagonal(pr.d.tail(n));
}

ReflectionMatrix strongest_tap(const TapSet& taps, const SubcarrierChannel& chan) {
    const int n = chan.num_elements();
    if (taps.num_tx_paths != chan.num_tx_paths() || taps.num_rx_paths != chan.num_rx_paths())
        throw std::invalid_argument("strongest_tap: tap/channel path counts differ");

    // H^(l) = inc C_l out^T; reduce through thin QR factors so the per-tap
    // singular problem is only min(N, L_t) x min(N, L_r).
    const Eigen::Index m1 = std::min(chan.incident.rows(), chan.incident.cols());
    const Eigen::Index m2 = std::min(chan.outgoing.rows(), chan.outgoing.cols());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr1(chan.incident);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr2(chan.outgoing);
    const Eigen::MatrixXcd q1 = qr1.householderQ() * Eigen::MatrixXcd::Identity(n, m1);
    const Eigen::MatrixXcd q2 = qr2.householderQ() * Eigen::MatrixXcd::Identity(n, m2);
    const Eigen::MatrixXcd r1 = qr1.matrixQR()
                                    .topLeftCorner(m1, chan.incident.cols())
                                    .template triangularView<Eigen::Upper>();
    const Eigen::MatrixXcd r2 = qr2.matrixQR()
                                    .topLeftCorner(m2, chan.outgoing.cols())
                                    .template triangularView<Eigen::Upper>();

    bool have_best = false;
    double best_power = -1.0;
    Eigen::MatrixXcd best_psi;

    for (int l = 0; l <= taps.num_taps(); ++l) {
        const Eigen::MatrixXcd mid = r1 * taps.tap_matrix(l) * r2.transpose();
        if (mid.norm() == 0.0) continue;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mid, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double sigma1 = svd.singularValues()(0);
        if (sigma1 <= 0.0) continue;
        const Eigen::VectorXcd u = q1 * svd.matrixU().col(0);
        const Eigen::VectorXcd v = q2.conjugate() * svd.matrixV().col(0);

        // Rank-one target sigma1 u v^H; the norm-relaxed maximizer is the
        // dominant eigenvector of its gain quadratic, projected to the
        // nearest symmetric unitary.
        const Eigen::MatrixXcd target = sigma1 * u * v.adjoint();
        QuadraticAggregates agg;
        agg.basis = vec(target.conjugate());
        agg.core = Eigen::MatrixXcd::Ones(1, 1);
        agg.b = Eigen::VectorXcd::Zero(n * n);
        agg.const_term = 0.0;
        const Eigen::VectorXcd psi_star = solve_relaxed(agg, static_cast<double>(n));
        const ReflectionMatrix candidate = nearest_symmetric_unitary(unvec(psi_star, n));

        // Power of this candidate on its own tap, against the full tap matrix.
        const Eigen::MatrixXcd w = chan.outgoing.transpose() * candidate.matrix() * chan.incident;
        const std::complex<double> tr = (w * taps.tap_matrix(l)).trace();
        const double power = std::norm(tr);
        if (!have_best || power > best_power) {
            have_best = true;
            best_power = power;
            best_psi = candidate.matrix();
        }
    }

    if (!have_best)  // all taps vanished: any feasible configuration works
        best_psi = Eigen::MatrixXcd::Identity(n, n);
    return ReflectionMatrix::beyond_diagonal(std::move(best_psi));
}

Eigen::MatrixXcd random_unitary(int n, Rng& rng) {
    Eigen::MatrixXcd z(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) z(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    for (int k = 0; k < n; ++k) {
        const std::complex<double> rkk = qr.matrixQR()(k, k);
        const double mag = std::abs(rkk);
        q.col(k) *= mag > 0.0 ? rkk / mag : 1.0;
    }
    return q;
}

ReflectionMatrix random_bd(const SubcarrierChannel& chan, std::uint64_t seed, int iterations) {
    const int n = chan.num_elements();
    Rng rng(seed);
    const Eigen::MatrixXcd s = random_unitary(n, rng);
    const Eigen::VectorXcd d = refine_diagonal(s, chan, iterations).tail(n);
    Eigen::MatrixXcd psi = s * d.asDiagonal() * s.transpose();
    return ReflectionMatrix::beyond_diagonal(std::move(psi));
}

}  // namespace bdris
