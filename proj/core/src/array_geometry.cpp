// SPDX-License-Identifier: Apache-2.0
#include "bdris/array_geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace bdris {

Eigen::Vector3d ElementGrid::position(int n) const {
    const int row = n % rows;
    const int col = n / rows;
    return {0.0, col * spacing_m, row * spacing_m};
}

void ElementGrid::validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("ElementGrid: rows and cols must be >= 1");
    if (size() > 1 && spacing_m <= 0.0)
        throw std::invalid_argument("ElementGrid: spacing must be positive for multi-element grids");
}

Eigen::Vector3d direction_unit_vector(double azimuth_rad, double elevation_rad) {
    const double ce = std::cos(elevation_rad);
    return {ce * std::cos(azimuth_rad), ce * std::sin(azimuth_rad), std::sin(elevation_rad)};
}

Eigen::VectorXcd array_response(const ElementGrid& grid, double carrier_freq_hz,
                                double azimuth_rad, double elevation_rad) {
    grid.validate();
    const int n_el = grid.size();
    const Eigen::Vector3d u = direction_unit_vector(azimuth_rad, elevation_rad);
    Eigen::VectorXcd a(n_el);
    for (int n = 0; n < n_el; ++n) {
        const double delay = grid.position(n).dot(u) / speed_of_light_mps;
        a(n) = std::polar(1.0, -2.0 * M_PI * carrier_freq_hz * delay);
    }
    return a;
}

}  // namespace bdris
