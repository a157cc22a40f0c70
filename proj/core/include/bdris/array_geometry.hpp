// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace bdris {

// Planar element grid in the yz-plane, broadside along +x.
// Elements are indexed column-major: index n = row + rows*col, with columns
// stepping along y and rows along z.
struct ElementGrid {
    int rows = 1;
    int cols = 1;
    double spacing_m = 0.0;

    int size() const { return rows * cols; }

    // Position of element n relative to element 0, in meters.
    Eigen::Vector3d position(int n) const;

    void validate() const;
};

// Unit vector associated with an (azimuth, elevation) direction measured from
// broadside: u = (cos el * cos az, cos el * sin az, sin el).
Eigen::Vector3d direction_unit_vector(double azimuth_rad, double elevation_rad);

// Array response vector for a plane wave in direction (azimuth, elevation):
// entry n = exp(-j 2 pi f_c dtau_n) with dtau_n = (p_n - p_0) . u / c the
// geometric delay of element n relative to element 0. Entry 0 is always 1 and
// every entry has unit modulus.
Eigen::VectorXcd array_response(const ElementGrid& grid, double carrier_freq_hz,
                                double azimuth_rad, double elevation_rad);

inline constexpr double speed_of_light_mps = 299792458.0;

}  // namespace bdris
