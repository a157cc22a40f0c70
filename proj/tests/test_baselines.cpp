// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bdris/baselines.hpp"
#include "bdris/scenario.hpp"
#include "test_util.hpp"

using namespace bdris;
using cd = std::complex<double>;

namespace {

// Factored channel with controlled path counts via the real pipeline.
SubcarrierChannel paths_channel(Rng& rng, int n_static, int n_tx, int n_rx, int s,
                                const ElementGrid& grid, TapSet* taps_out = nullptr) {
    const PathSet p = test::random_paths(rng, n_static, n_tx, n_rx);
    const ClockAndLength cl = choose_clock_and_length(p, 30e6, 1e-3, s - 1);
    SystemParams params;
    params.carrier_freq_hz = 3e9;
    params.bandwidth_hz = 30e6;
    params.num_subcarriers = s;
    params.num_taps = cl.num_taps;
    params.clock_delay_s = cl.clock_delay_s;
    params.noise_power_w = 1e-12;
    params.grid = grid;
    const TapSet taps = compute_taps(p, params);
    if (taps_out) *taps_out = taps;
    return build_subcarrier_channel(dft_coeffs(taps, s), array_responses(p, grid, 3e9));
}

}  // namespace

TEST_CASE("diagonal_power_iteration: N = 1 matches a scalar grid search") {
    Rng rng(3);
    const SubcarrierChannel chan = test::random_dense_channel(rng, 1, 5, true);
    const ReflectionMatrix psi = diagonal_power_iteration(chan, 100);
    const double got = total_gain(psi.matrix(), chan);
    double best = 0.0;
    for (int k = 0; k < 20000; ++k) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = std::polar(1.0, 2.0 * M_PI * k / 20000);
        best = std::max(best, total_gain(m, chan));
    }
    CHECK(got >= best * (1.0 - 1e-6));
}

TEST_CASE("diagonal_power_iteration: never below the identity configuration") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const SubcarrierChannel chan = test::random_dense_channel(rng, 4, 6, trial % 2 == 0);
        const ReflectionMatrix psi = diagonal_power_iteration(chan, 60);
        const double got = total_gain(psi.matrix(), chan);
        const double identity = total_gain(Eigen::MatrixXcd::Identity(4, 4), chan);
        CHECK(got >= identity * (1.0 - 1e-12));
    }
}

TEST_CASE("diagonal_power_iteration: flat channel reaches coherent combining") {
    // Frequency-flat: a single tap, so every subcarrier shares one matrix and
    // the refinement operator is rank one; the optimum aligns all phases and
    // achieves |h| + sum_n |c_n|.
    Rng rng(7);
    const int n = 4;
    const Eigen::MatrixXcd h = test::random_matrix(rng, n, n);
    const cd stat = rng.complex_normal();
    std::vector<Eigen::MatrixXcd> mats(8, h);
    Eigen::VectorXcd statics = Eigen::VectorXcd::Constant(8, stat);
    const SubcarrierChannel chan = SubcarrierChannel::from_dense(statics, mats);
    const ReflectionMatrix psi = diagonal_power_iteration(chan, 100);
    const double achieved = std::sqrt(total_gain(psi.matrix(), chan) / 8.0);
    const double bound = std::abs(stat) + h.diagonal().cwiseAbs().sum();
    CHECK(achieved >= bound * 0.99);
    CHECK(achieved <= bound * (1.0 + 1e-9));
}

TEST_CASE("diagonal mode invariants hold") {
    Rng rng(11);
    const SubcarrierChannel chan = test::random_dense_channel(rng, 5, 4, true);
    const ReflectionMatrix psi = diagonal_power_iteration(chan, 30);
    CHECK(psi.mode() == ReflectionMatrix::Mode::Diagonal);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            if (i == j)
                CHECK(std::abs(std::abs(psi.matrix()(i, i)) - 1.0) < 1e-12);
            else
                CHECK(psi.matrix()(i, j) == cd(0.0, 0.0));
        }
    // A diagonal unit-modulus matrix is feasible for the BD constraints too.
    CHECK(psi.symmetry_residual() <= 1e-10 * 5);
    CHECK(psi.unitarity_residual() <= 1e-10 * 5);
}

TEST_CASE("strongest_tap: rank-one tap attains the sigma_1 bound exactly") {
    Rng rng(13);
    const ElementGrid grid{2, 2, 0.025};
    TapSet taps;
    // Single TX path and single RX path: every tap matrix is rank one.
    SubcarrierChannel chan = paths_channel(rng, 0, 1, 1, 8, grid, &taps);
    const ReflectionMatrix psi = strongest_tap(taps, chan);
    CHECK(psi.symmetry_residual() <= 1e-10 * grid.size());
    CHECK(psi.unitarity_residual() <= 1e-10 * grid.size());

    // The chosen tap power must equal sigma_1^2 of the strongest tap.
    double best_sigma = 0.0;
    int best_l = 0;
    for (int l = 0; l <= taps.num_taps(); ++l) {
        const Eigen::MatrixXcd h = chan.incident * taps.tap_matrix(l) * chan.outgoing.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
        if (svd.singularValues()(0) > best_sigma) {
            best_sigma = svd.singularValues()(0);
            best_l = l;
        }
    }
    const Eigen::MatrixXcd h_best =
        chan.incident * taps.tap_matrix(best_l) * chan.outgoing.transpose();
    const double attained = std::abs((psi.matrix() * h_best).trace());
    CHECK(attained == doctest::Approx(best_sigma).epsilon(1e-9));
}

TEST_CASE("strongest_tap: unitary trace bound is never exceeded") {
    Rng rng(17);
    const ElementGrid grid{2, 2, 0.025};
    TapSet taps;
    SubcarrierChannel chan = paths_channel(rng, 0, 3, 3, 12, grid, &taps);
    const ReflectionMatrix psi = strongest_tap(taps, chan);
    for (int l = 0; l <= taps.num_taps(); ++l) {
        const Eigen::MatrixXcd h = chan.incident * taps.tap_matrix(l) * chan.outgoing.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
        CHECK(std::abs((psi.matrix() * h).trace()) <=
              svd.singularValues().sum() * (1.0 + 1e-9));
    }
}

TEST_CASE("strongest_tap ties the full pipeline on a single-tap rank-one channel") {
    Rng rng(19);
    const ElementGrid grid{2, 2, 0.025};
    // One path per link, delays aligned to the grid: exactly one tap.
    PathSet p;
    p.tx_paths.push_back({0.6, 150e-9, 0.4, -0.2});
    p.rx_paths.push_back({0.8, 90e-9, -0.5, 0.3});
    SystemParams params;
    params.carrier_freq_hz = 3e9;
    params.bandwidth_hz = 30e6;
    params.num_subcarriers = 8;
    params.num_taps = 0;
    params.clock_delay_s = 240e-9;
    params.noise_power_w = 1e-12;
    params.grid = grid;
    const TapSet taps = compute_taps(p, params);
    const SubcarrierChannel chan =
        build_subcarrier_channel(dft_coeffs(taps, 8), array_responses(p, grid, 3e9));

    const double gain_tap = total_gain(strongest_tap(taps, chan).matrix(), chan);
    const double gain_alg = total_gain(optimize(chan, 100).matrix(), chan);
    CHECK(gain_tap == doctest::Approx(gain_alg).epsilon(1e-6));
}

TEST_CASE("random_bd: feasible and deterministic per seed") {
    Rng rng(23);
    const SubcarrierChannel chan = test::random_dense_channel(rng, 4, 6, false);
    const ReflectionMatrix a = random_bd(chan, 777, 50);
    const ReflectionMatrix b = random_bd(chan, 777, 50);
    const ReflectionMatrix c = random_bd(chan, 778, 50);
    CHECK((a.matrix() - b.matrix()).norm() == 0.0);
    CHECK((a.matrix() - c.matrix()).norm() > 1e-8);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        const ReflectionMatrix m = random_bd(chan, seed, 20);
        CHECK(m.symmetry_residual() <= 1e-10 * 4);
        CHECK(m.unitarity_residual() <= 1e-10 * 4);
    }
}

TEST_CASE("random_unitary is unitary and Haar-phase corrected") {
    Rng rng(29);
    for (int n : {1, 3, 6}) {
        const Eigen::MatrixXcd q = random_unitary(n, rng);
        CHECK((q.adjoint() * q - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-12 * n);
    }
}

TEST_CASE("random_bd averages below the optimized pipeline on most instances") {
    Rng rng(31);
    const ElementGrid grid{2, 2, 0.025};
    int wins = 0;
    const int instances = 20;
    for (int inst = 0; inst < instances; ++inst) {
        const SubcarrierChannel chan = paths_channel(rng, 0, 3, 3, 8, grid);
        const double opt = total_gain(optimize(chan, 60).matrix(), chan);
        double acc = 0.0;
        for (int seed = 0; seed < 100; ++seed)
            acc += total_gain(random_bd(chan, 1000 + seed, 60).matrix(), chan);
        if (opt >= acc / 100.0) ++wins;
    }
    CHECK(wins >= 19);  // statistical: >= 95% of instances
}
