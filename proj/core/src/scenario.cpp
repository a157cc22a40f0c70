// SPDX-License-Identifier: Apache-2.0
#include "bdris/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "bdris/rng.hpp"

namespace bdris {

double free_space_gain(double distance_m, double carrier_freq_hz) {
    if (distance_m <= 0.0) throw std::invalid_argument("free_space_gain: distance must be positive");
    const double lambda = speed_of_light_mps / carrier_freq_hz;
    return lambda / (4.0 * M_PI * distance_m);
}

void ScenarioConfig::validate() const {
    if (num_tx_paths < 1 || num_rx_paths < 1)
        throw std::invalid_argument("ScenarioConfig: RIS links need at least one path");
    if (num_static_paths < 0)
        throw std::invalid_argument("ScenarioConfig: num_static_paths must be >= 0");
    if (rician_kappa < 0.0)
        throw std::invalid_argument("ScenarioConfig: Rician kappa must be >= 0");
    if (delay_spread_s <= 0.0)
        throw std::invalid_argument("ScenarioConfig: delay spread must be positive");
    if (carrier_freq_hz <= 0.0)
        throw std::invalid_argument("ScenarioConfig: carrier frequency must be positive");
    if (!(angular_spread_rad > 0.0 && angular_spread_rad < M_PI / 2))
        throw std::invalid_argument("ScenarioConfig: angular spread must lie in (0, pi/2)");
    if ((tx_position_m - ris_center_m).norm() == 0.0 ||
        (rx_position_m - ris_center_m).norm() == 0.0 ||
        (tx_position_m - rx_position_m).norm() == 0.0)
        throw std::invalid_argument("ScenarioConfig: positions must be distinct");
}

namespace {

struct LosGeometry {
    double distance_m = 0.0;
    double azimuth_rad = 0.0;
    double elevation_rad = 0.0;
};

LosGeometry los_geometry(const Eigen::Vector3d& endpoint, const Eigen::Vector3d& ris_center) {
    LosGeometry g;
    const Eigen::Vector3d d = endpoint - ris_center;
    g.distance_m = d.norm();
    const Eigen::Vector3d u = d / g.distance_m;
    g.azimuth_rad = std::atan2(u.y(), u.x());
    g.elevation_rad = std::asin(std::clamp(u.z(), -1.0, 1.0));
    return g;
}

struct NlosDraw {
    double excess_delay_s = 0.0;
    double azimuth_rad = 0.0;
    double elevation_rad = 0.0;
};

// Draw order is fixed so that the sample stream is independent of kappa and
// of which draws end up being used.
std::vector<NlosDraw> draw_nlos(Rng& rng, int count, const ScenarioConfig& cfg) {
    std::vector<NlosDraw> draws(count);
    for (NlosDraw& d : draws) {
        d.excess_delay_s = rng.exponential(cfg.delay_spread_s);
        d.azimuth_rad = rng.uniform(-cfg.angular_spread_rad, cfg.angular_spread_rad);
        d.elevation_rad = rng.uniform(-cfg.angular_spread_rad, cfg.angular_spread_rad);
    }
    return draws;
}

// Place NLOS paths with relative powers following the exponential delay
// profile, normalized to carry exactly `total_power`.
void emit_nlos(std::vector<Path>& out, const std::vector<NlosDraw>& draws, double base_delay_s,
               double total_power, double delay_spread_s, bool with_angles) {
    double norm = 0.0;
    for (const NlosDraw& d : draws) norm += std::exp(-d.excess_delay_s / delay_spread_s);
    for (const NlosDraw& d : draws) {
        const double frac = std::exp(-d.excess_delay_s / delay_spread_s) / norm;
        Path p;
        p.attenuation = std::sqrt(total_power * frac);
        p.delay_s = base_delay_s + d.excess_delay_s;
        if (with_angles) {
            p.azimuth_rad = d.azimuth_rad;
            p.elevation_rad = d.elevation_rad;
        }
        out.push_back(p);
    }
}

std::vector<Path> make_ris_link(Rng& rng, const ScenarioConfig& cfg,
                                const Eigen::Vector3d& endpoint, int num_paths,
                                double excess_amp) {
    const LosGeometry los = los_geometry(endpoint, cfg.ris_center_m);
    const double link_amp = free_space_gain(los.distance_m, cfg.carrier_freq_hz) * excess_amp;
    const double link_power = link_amp * link_amp;
    const double los_delay = los.distance_m / speed_of_light_mps;
    const double kappa = cfg.rician_kappa;

    // Candidate NLOS draws are always generated to keep the stream stable.
    const std::vector<NlosDraw> draws = draw_nlos(rng, num_paths, cfg);

    std::vector<Path> paths;
    if (kappa >= kappa_los_only) {
        Path p;
        p.attenuation = link_amp;
        p.delay_s = los_delay;
        p.azimuth_rad = los.azimuth_rad;
        p.elevation_rad = los.elevation_rad;
        paths.push_back(p);
        return paths;
    }
    if (kappa > 0.0) {
        Path p;
        p.attenuation = std::sqrt(link_power * kappa / (kappa + 1.0));
        p.delay_s = los_delay;
        p.azimuth_rad = los.azimuth_rad;
        p.elevation_rad = los.elevation_rad;
        paths.push_back(p);
        const std::vector<NlosDraw> rest(draws.begin() + 1, draws.end());
        if (!rest.empty())
            emit_nlos(paths, rest, los_delay, link_power / (kappa + 1.0), cfg.delay_spread_s, true);
        else
            paths.front().attenuation = link_amp;  // single-path link: LOS takes it all
    } else {
        emit_nlos(paths, draws, los_delay, link_power, cfg.delay_spread_s, true);
    }
    return paths;
}

}  // namespace

Realization generate(const ScenarioConfig& cfg, std::uint64_t realization_index) {
    cfg.validate();

    Realization r;
    r.seed = derive_stream_seed(cfg.master_seed, realization_index);
    Rng rng(r.seed);

    const double excess_amp = std::pow(10.0, -cfg.path_excess_loss_db / 20.0);

    r.paths.tx_paths = make_ris_link(rng, cfg, cfg.tx_position_m, cfg.num_tx_paths, excess_amp);
    r.paths.rx_paths = make_ris_link(rng, cfg, cfg.rx_position_m, cfg.num_rx_paths, excess_amp);

    if (cfg.num_static_paths > 0) {
        // Reference budget of the cascaded route: free space over the full
        // TX-RIS-RX distance, degraded by the same excess loss as the two
        // hops. The configured offset is applied on top of that.
        const double d1 = (cfg.tx_position_m - cfg.ris_center_m).norm();
        const double d2 = (cfg.rx_position_m - cfg.ris_center_m).norm();
        const double ref_amp =
            free_space_gain(d1 + d2, cfg.carrier_freq_hz) * excess_amp * excess_amp;
        const double total_power =
            ref_amp * ref_amp * std::pow(10.0, cfg.static_gain_offset_db / 10.0);
        const double base_delay =
            (cfg.tx_position_m - cfg.rx_position_m).norm() / speed_of_light_mps;
        const std::vector<NlosDraw> draws = draw_nlos(rng, cfg.num_static_paths, cfg);
        emit_nlos(r.paths.static_paths, draws, base_delay, total_power, cfg.delay_spread_s, false);
    }

    r.paths.validate();
    return r;
}

}  // namespace bdris
