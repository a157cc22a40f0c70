// SPDX-License-Identifier: Apache-2.0
#include "bdris/capacity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bdris {

PowerAllocation waterfill(const Eigen::VectorXd& gains, double total_power_w,
                          double noise_power_w) {
    const Eigen::Index s = gains.size();
    if (s == 0) throw std::invalid_argument("waterfill: empty gain vector");
    if (total_power_w <= 0.0) throw std::invalid_argument("waterfill: total power must be positive");
    if (noise_power_w <= 0.0) throw std::invalid_argument("waterfill: noise power must be positive");
    if ((gains.array() < 0.0).any()) throw std::invalid_argument("waterfill: gains must be >= 0");

    PowerAllocation out;
    out.total_power_w = total_power_w;
    out.powers_w = Eigen::VectorXd::Zero(s);

    // Inverse-gain thresholds N0/g for the positive-gain subcarriers.
    double min_pos_gain = std::numeric_limits<double>::infinity();
    for (Eigen::Index nu = 0; nu < s; ++nu)
        if (gains(nu) > 0.0) min_pos_gain = std::min(min_pos_gain, gains(nu));
    if (!std::isfinite(min_pos_gain)) {
        out.degenerate = true;
        return out;
    }
    Eigen::VectorXd threshold(s);
    for (Eigen::Index nu = 0; nu < s; ++nu)
        threshold(nu) =
            gains(nu) > 0.0 ? noise_power_w / gains(nu) : std::numeric_limits<double>::infinity();

    const double target = total_power_w * static_cast<double>(s);
    auto allocated = [&](double mu) {
        double acc = 0.0;
        for (Eigen::Index nu = 0; nu < s; ++nu)
            if (mu > threshold(nu)) acc += mu - threshold(nu);
        return acc;
    };

    double lo = 0.0;
    double hi = total_power_w + noise_power_w * static_cast<double>(s) / min_pos_gain;
    while (allocated(hi) < target) hi *= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (allocated(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    double mu = 0.5 * (lo + hi);

    // Exact budget on the active set the bisection resolved; fall back to the
    // bisected value if the polished level would flip any activity decision.
    double thr_sum = 0.0;
    int active = 0;
    for (Eigen::Index nu = 0; nu < s; ++nu)
        if (mu > threshold(nu)) {
            thr_sum += threshold(nu);
            ++active;
        }
    if (active > 0) {
        const double mu_exact = (target + thr_sum) / active;
        bool consistent = true;
        for (Eigen::Index nu = 0; nu < s; ++nu) {
            const bool was_active = mu > threshold(nu);
            if (was_active != (mu_exact > threshold(nu))) {
                consistent = false;
                break;
            }
        }
        if (consistent) mu = mu_exact;
    }

    out.water_level_w = mu;
    for (Eigen::Index nu = 0; nu < s; ++nu)
        if (mu > threshold(nu)) out.powers_w(nu) = mu - threshold(nu);
    return out;
}

CapacityResult capacity_from_gains(const Eigen::VectorXd& gains, const SystemParams& params,
                                   double total_power_w) {
    params.validate();
    if (gains.size() != params.num_subcarriers)
        throw std::invalid_argument("capacity_from_gains: gain count must equal S");

    CapacityResult out;
    out.gains = gains;
    out.allocation = waterfill(gains, total_power_w, params.noise_power_w);
    const double prefactor =
        params.bandwidth_hz / static_cast<double>(params.num_taps + params.num_subcarriers);
    out.per_subcarrier_rate_bps = Eigen::VectorXd::Zero(gains.size());
    if (out.allocation.degenerate) return out;
    for (Eigen::Index nu = 0; nu < gains.size(); ++nu) {
        const double snr = out.allocation.powers_w(nu) * gains(nu) / params.noise_power_w;
        out.per_subcarrier_rate_bps(nu) = prefactor * std::log2(1.0 + snr);
    }
    out.capacity_bps = out.per_subcarrier_rate_bps.sum();
    return out;
}

CapacityResult evaluate_capacity(const ReflectionMatrix& psi, const SubcarrierChannel& chan,
                                 const SystemParams& params, double total_power_w) {
    psi.validate();
    return capacity_from_gains(channel_gains(psi.matrix(), chan), params, total_power_w);
}

}  // namespace bdris
