// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/paths.hpp"
#include "bdris/rng.hpp"

namespace bdris::test {

inline Eigen::VectorXcd random_vector(Rng& rng, int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.complex_normal();
    return v;
}

inline Eigen::MatrixXcd random_matrix(Rng& rng, int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
    return m;
}

inline Eigen::MatrixXcd random_hermitian_psd(Rng& rng, int n, int rank) {
    const Eigen::MatrixXcd g = random_matrix(rng, n, rank);
    Eigen::MatrixXcd a = g * g.adjoint();
    return 0.5 * (a + a.adjoint().eval());
}

inline Eigen::MatrixXcd random_complex_symmetric(Rng& rng, int n) {
    const Eigen::MatrixXcd g = random_matrix(rng, n, n);
    return 0.5 * (g + g.transpose().eval());
}

// Random multipath set with angles inside the broadside cone and delays in a
// few symbol periods around the geometric minimum.
inline PathSet random_paths(Rng& rng, int n_static, int n_tx, int n_rx,
                            double bandwidth_hz = 30e6) {
    PathSet p;
    auto make = [&](double base_delay, bool angles) {
        Path path;
        path.attenuation = 0.05 + 0.9 * rng.uniform();
        path.delay_s = base_delay + rng.uniform() * 8.0 / bandwidth_hz;
        if (angles) {
            path.azimuth_rad = rng.uniform(-1.0, 1.0);
            path.elevation_rad = rng.uniform(-1.0, 1.0);
        }
        return path;
    };
    for (int i = 0; i < n_static; ++i) p.static_paths.push_back(make(400e-9, false));
    for (int i = 0; i < n_tx; ++i) p.tx_paths.push_back(make(150e-9, true));
    for (int i = 0; i < n_rx; ++i) p.rx_paths.push_back(make(80e-9, true));
    return p;
}

// Dense random subcarrier channel (identity responses), optionally with a
// nonzero static component.
inline SubcarrierChannel random_dense_channel(Rng& rng, int n, int s, bool with_static) {
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(s);
    for (int nu = 0; nu < s; ++nu) mats.push_back(random_matrix(rng, n, n));
    Eigen::VectorXcd stat = Eigen::VectorXcd::Zero(s);
    if (with_static) stat = random_vector(rng, s);
    return SubcarrierChannel::from_dense(stat, mats);
}

// Random symmetric unitary via U U^T with Haar-ish U (QR of Gaussian).
inline Eigen::MatrixXcd random_symmetric_unitary(Rng& rng, int n) {
    const Eigen::MatrixXcd z = random_matrix(rng, n, n);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    const Eigen::MatrixXcd q = qr.householderQ();
    return q * q.transpose();
}

// Enumerates all 2x2 symmetric unitary matrices on a parameter grid:
// |p| = |s| = cos(t), |r| = sin(t), p = c e^{ia}, s = c e^{ib},
// r = sin(t) e^{ig} with 2g = a + b +- pi. Calls fn for every grid point.
template <typename Fn>
void for_each_symmetric_unitary_2x2(int k_phase, int k_mag, Fn&& fn) {
    Eigen::Matrix2cd psi;
    for (int ia = 0; ia < k_phase; ++ia) {
        const double a = 2.0 * M_PI * ia / k_phase;
        for (int ib = 0; ib < k_phase; ++ib) {
            const double b = 2.0 * M_PI * ib / k_phase;
            for (int im = 0; im < k_mag; ++im) {
                const double t = 0.5 * M_PI * im / (k_mag - 1);
                const double c = std::cos(t), r = std::sin(t);
                for (int branch = 0; branch < 2; ++branch) {
                    const double g = 0.5 * (a + b + (branch == 0 ? M_PI : -M_PI));
                    psi(0, 0) = std::polar(c, a);
                    psi(1, 1) = std::polar(c, b);
                    psi(0, 1) = psi(1, 0) = std::polar(r, g);
                    fn(psi);
                }
            }
        }
    }
}

}  // namespace bdris::test
