// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "bdris/array_geometry.hpp"
#include "bdris/paths.hpp"

namespace bdris {

// Free-space amplitude gain of an isotropic link: lambda / (4 pi d).
double free_space_gain(double distance_m, double carrier_freq_hz);

// Random-scenario description. Defaults follow the reference setup: RIS in
// the yz-plane centered at the origin facing +x, TX at (40, -40, 0) m, RX at
// (20, 0, 0) m, 3 GHz carrier, 8x8 grid at quarter-wavelength pitch.
struct ScenarioConfig {
    Eigen::Vector3d tx_position_m{40.0, -40.0, 0.0};
    Eigen::Vector3d rx_position_m{20.0, 0.0, 0.0};
    Eigen::Vector3d ris_center_m{0.0, 0.0, 0.0};
    double carrier_freq_hz = 3.0e9;
    ElementGrid grid{8, 8, 0.0};      // spacing 0 = quarter wavelength
    int num_tx_paths = 6;             // L_t
    int num_rx_paths = 6;             // L_r
    int num_static_paths = 0;         // L_s, 0 disables the direct channel
    double rician_kappa = 0.0;        // LOS-to-scatter power ratio per RIS link
    double static_gain_offset_db = -40.0;
    double delay_spread_s = 100e-9;   // mean NLOS excess delay
    double angular_spread_rad = M_PI / 3.0;  // paths uniform within +-60 deg of broadside
    // Extra attenuation of every link relative to free space. The reference
    // cluster model is non-line-of-sight-like: free-space-strength scatter
    // paths would put the link tens of dB above a realistic NLOS budget.
    double path_excess_loss_db = 20.0;
    std::uint64_t master_seed = 0;

    double wavelength_m() const { return speed_of_light_mps / carrier_freq_hz; }
    double element_spacing_m() const {
        return grid.spacing_m > 0.0 ? grid.spacing_m : wavelength_m() / 4.0;
    }
    void validate() const;
};

// Above this value the Rician split degenerates to a single LOS path.
inline constexpr double kappa_los_only = 1e6;

struct Realization {
    PathSet paths;
    std::uint64_t seed = 0;
};

// Draw realization `realization_index` of the multipath environment.
//
// Per RIS link: if kappa > 0 the first path is the geometric LOS path with
// power fraction kappa/(kappa+1); the remaining paths are NLOS with
// exponential excess delays (mean delay_spread_s), angles uniform within the
// angular spread and relative powers following the exponential delay profile,
// normalized so the NLOS share is exactly 1/(kappa+1) of the link power.
// The total link power equals the free-space budget (including the excess
// loss) independent of kappa. The static channel, when enabled, is pure NLOS
// with total power static_gain_offset_db relative to the end-to-end
// free-space budget of the cascaded route.
//
// The random draws depend only on (master_seed, realization_index), never on
// kappa, so kappa sweeps are coupled across points.
Realization generate(const ScenarioConfig& config, std::uint64_t realization_index);

}  // namespace bdris
