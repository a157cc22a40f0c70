// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bdris {

// One propagation path. Angles are measured from the RIS broadside and are
// meaningful only for RIS-side paths; the direct (static) link carries zeros.
struct Path {
    double attenuation = 0.0;   // amplitude in [0, 1]
    double delay_s = 0.0;       // absolute propagation delay, >= 0
    double azimuth_rad = 0.0;
    double elevation_rad = 0.0;
};

// Multipath description of the three links: the static TX-RX channel (may be
// empty), the TX-RIS channel, and the RIS-RX channel.
struct PathSet {
    std::vector<Path> static_paths;  // L_s, may be empty
    std::vector<Path> tx_paths;      // L_t >= 1
    std::vector<Path> rx_paths;      // L_r >= 1

    void validate() const;

    // Minimum end-to-end delay over static paths and all TX/RX pair sums.
    double min_end_to_end_delay() const;
};

// Text serialization. Format (one record per line, full double precision):
//   # bdris paths v1
//   static <attenuation> <delay_s> <azimuth_rad> <elevation_rad>
//   tx     <attenuation> <delay_s> <azimuth_rad> <elevation_rad>
//   rx     <attenuation> <delay_s> <azimuth_rad> <elevation_rad>
// Lines starting with '#' are comments. Record order within a link is
// preserved.
void write_paths(std::ostream& os, const PathSet& paths);
PathSet read_paths(std::istream& is);

void write_paths_file(const std::string& path, const PathSet& paths);
PathSet read_paths_file(const std::string& path);

}  // namespace bdris
