// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "bdris/channel.hpp"
#include "bdris/solver.hpp"

namespace bdris {

struct PowerAllocation {
    Eigen::VectorXd powers_w;      // q_nu >= 0, sum = q * S
    double water_level_w = 0.0;    // mu
    double total_power_w = 0.0;    // q (per-subcarrier average)
    bool degenerate = false;       // all-zero gains: nothing allocated
};

// Water-filling over parallel subcarriers: q_nu = max(mu - N0/g_nu, 0) with mu
// chosen by bisection (plus an exact polish on the resolved active set) so
// that sum_nu q_nu = q * S. Subcarriers with zero gain receive nothing.
PowerAllocation waterfill(const Eigen::VectorXd& gains, double total_power_w,
                          double noise_power_w);

struct CapacityResult {
    double capacity_bps = 0.0;
    Eigen::VectorXd per_subcarrier_rate_bps;  // B/(T+S) log2(1 + q_nu g_nu / N0)
    Eigen::VectorXd gains;                    // |h_nu + tr(Psi H_nu)|^2
    PowerAllocation allocation;
};

// Capacity with water-filled powers:
//   C = B/(T+S) sum_nu log2(1 + q_nu g_nu / N0)   [bit/s]
CapacityResult evaluate_capacity(const ReflectionMatrix& psi, const SubcarrierChannel& chan,
                                 const SystemParams& params, double total_power_w);

// Same, starting from precomputed per-subcarrier gains.
CapacityResult capacity_from_gains(const Eigen::VectorXd& gains, const SystemParams& params,
                                   double total_power_w);

}  // namespace bdris
