// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bdris/baselines.hpp"
#include "bdris/capacity.hpp"
#include "test_util.hpp"

using namespace bdris;

namespace {

SystemParams flat_params(int s, int t = 0, double noise = 1.0) {
    SystemParams p;
    p.carrier_freq_hz = 3e9;
    p.bandwidth_hz = 30e6;
    p.num_subcarriers = s;
    p.num_taps = t;
    p.clock_delay_s = 0.0;
    p.noise_power_w = noise;
    p.grid = ElementGrid{1, 1, 0.0};
    return p;
}

}  // namespace

TEST_CASE("waterfill: equal gains share power equally") {
    const int s = 8;
    const double g = 0.37, q = 2.0, n0 = 0.9;
    const PowerAllocation a = waterfill(Eigen::VectorXd::Constant(s, g), q, n0);
    CHECK(!a.degenerate);
    CHECK(a.water_level_w == doctest::Approx(q + n0 / g).epsilon(1e-9));
    for (int nu = 0; nu < s; ++nu) CHECK(a.powers_w(nu) == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("waterfill: two-subcarrier hand instance") {
    Eigen::VectorXd g(2);
    g << 1.0, 0.5;
    const PowerAllocation a = waterfill(g, 1.0, 1.0);
    CHECK(a.water_level_w == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(a.powers_w(0) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(a.powers_w(1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("waterfill: zero-gain subcarriers are excluded") {
    Eigen::VectorXd g(2);
    g << 1e6, 0.0;
    const PowerAllocation a = waterfill(g, 1.0, 1.0);
    CHECK(a.powers_w(1) == 0.0);
    CHECK(a.powers_w(0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("waterfill: all-zero gains degenerate cleanly") {
    const PowerAllocation a = waterfill(Eigen::VectorXd::Zero(4), 1.0, 1.0);
    CHECK(a.degenerate);
    CHECK(a.powers_w.norm() == 0.0);
    const CapacityResult c = capacity_from_gains(Eigen::VectorXd::Zero(4), flat_params(4), 1.0);
    CHECK(c.capacity_bps == 0.0);
}

TEST_CASE("waterfill: budget and KKT conditions on random gains") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int s = 2 + static_cast<int>(rng.raw() % 40);
        Eigen::VectorXd g(s);
        for (int nu = 0; nu < s; ++nu) {
            const double roll = rng.uniform();
            g(nu) = roll < 0.1 ? 0.0 : std::pow(10.0, rng.uniform(-3.0, 2.0));
        }
        if (g.maxCoeff() == 0.0) g(0) = 1.0;
        const double q = std::pow(10.0, rng.uniform(-2.0, 2.0));
        const double n0 = std::pow(10.0, rng.uniform(-2.0, 1.0));
        const PowerAllocation a = waterfill(g, q, n0);
        const double budget = q * s;
        CHECK(a.powers_w.sum() == doctest::Approx(budget).epsilon(1e-9));
        for (int nu = 0; nu < s; ++nu) {
            CHECK(a.powers_w(nu) >= 0.0);
            if (g(nu) == 0.0) {
                CHECK(a.powers_w(nu) == 0.0);
                continue;
            }
            const double threshold = n0 / g(nu);
            if (a.powers_w(nu) > 0.0)
                CHECK(a.powers_w(nu) ==
                      doctest::Approx(a.water_level_w - threshold).epsilon(1e-9));
            else
                CHECK(a.water_level_w <= threshold * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("waterfill: input validation") {
    Eigen::VectorXd g = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(waterfill(g, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(waterfill(g, 1.0, 0.0), std::invalid_argument);
    g(1) = -0.5;
    CHECK_THROWS_AS(waterfill(g, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("capacity: single-carrier flat reduction") {
    const double g = 2.3, q = 1.7, n0 = 0.4;
    const CapacityResult c =
        capacity_from_gains(Eigen::VectorXd::Constant(1, g), flat_params(1, 0, n0), q);
    CHECK(c.capacity_bps == doctest::Approx(30e6 * std::log2(1.0 + q * g / n0)).epsilon(1e-12));
}

TEST_CASE("capacity: matches an independent formula evaluation") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int s = 3 + static_cast<int>(rng.raw() % 20);
        const int t = static_cast<int>(rng.raw() % s);
        Eigen::VectorXd g(s);
        for (int nu = 0; nu < s; ++nu) g(nu) = rng.uniform() < 0.15 ? 0.0 : rng.uniform() * 4.0;
        if (g.maxCoeff() == 0.0) g(0) = 1.0;
        const double q = 0.5 + rng.uniform() * 2.0;
        const double n0 = 0.2 + rng.uniform();
        SystemParams params = flat_params(s, t, n0);
        const CapacityResult c = capacity_from_gains(g, params, q);
        double expected = 0.0;
        for (int nu = 0; nu < s; ++nu)
            expected += std::log2(1.0 + c.allocation.powers_w(nu) * g(nu) / n0);
        expected *= params.bandwidth_hz / (t + s);
        CHECK(c.capacity_bps == doctest::Approx(expected).epsilon(1e-12));
        CHECK(c.capacity_bps >= 0.0);
    }
}

TEST_CASE("capacity: monotone in every gain and above equal-power allocation") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int s = 6;
        Eigen::VectorXd g(s);
        for (int nu = 0; nu < s; ++nu) g(nu) = 0.05 + rng.uniform() * 2.0;
        SystemParams params = flat_params(s, 2, 0.8);
        const double q = 1.3;
        const CapacityResult base = capacity_from_gains(g, params, q);

        // Perturbation monotonicity.
        const int which = static_cast<int>(rng.raw() % s);
        Eigen::VectorXd g2 = g;
        g2(which) *= 1.05;
        CHECK(capacity_from_gains(g2, params, q).capacity_bps >=
              base.capacity_bps * (1.0 - 1e-12));

        // Water-filling dominates equal power.
        double equal = 0.0;
        for (int nu = 0; nu < s; ++nu) equal += std::log2(1.0 + q * g(nu) / 0.8);
        equal *= params.bandwidth_hz / (2 + s);
        CHECK(base.capacity_bps >= equal * (1.0 - 1e-12));
    }
}

TEST_CASE("evaluate_capacity runs the full reflection-to-rate chain") {
    Rng rng(13);
    const SubcarrierChannel chan = test::random_dense_channel(rng, 3, 8, true);
    SystemParams params = flat_params(8, 1, 1e-3);
    params.grid = ElementGrid{1, 3, 0.025};
    const ReflectionMatrix psi = diagonal_power_iteration(chan, 40);
    const CapacityResult c = evaluate_capacity(psi, chan, params, 0.5);
    CHECK(c.capacity_bps > 0.0);
    CHECK(c.gains.size() == 8);
    CHECK((c.gains - channel_gains(psi.matrix(), chan)).norm() == 0.0);
}
