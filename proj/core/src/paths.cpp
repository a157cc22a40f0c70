// SPDX-License-Identifier: Apache-2.0
#include "bdris/paths.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bdris {

void PathSet::validate() const {
    if (tx_paths.empty() || rx_paths.empty())
        throw std::invalid_argument("PathSet: tx_paths and rx_paths must be nonempty");
    auto check = [](const std::vector<Path>& v, const char* name, bool ris_side) {
        for (const Path& p : v) {
            if (!(p.attenuation >= 0.0 && p.attenuation <= 1.0))
                throw std::invalid_argument(std::string("PathSet: ") + name + " attenuation outside [0, 1]");
            if (!(p.delay_s >= 0.0) || !std::isfinite(p.delay_s))
                throw std::invalid_argument(std::string("PathSet: ") + name + " delay must be finite and >= 0");
            if (ris_side &&
                (std::abs(p.azimuth_rad) >= M_PI / 2 || std::abs(p.elevation_rad) >= M_PI / 2))
                throw std::invalid_argument(std::string("PathSet: ") + name +
                                            " angle outside (-pi/2, pi/2) of broadside");
        }
    };
    check(static_paths, "static", false);
    check(tx_paths, "tx", true);
    check(rx_paths, "rx", true);
}

double PathSet::min_end_to_end_delay() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Path& p : static_paths) m = std::min(m, p.delay_s);
    double min_tx = std::numeric_limits<double>::infinity();
    double min_rx = std::numeric_limits<double>::infinity();
    for (const Path& p : tx_paths) min_tx = std::min(min_tx, p.delay_s);
    for (const Path& p : rx_paths) min_rx = std::min(min_rx, p.delay_s);
    m = std::min(m, min_tx + min_rx);
    return m;
}

namespace {

const char* link_tag(int which) {
    switch (which) {
        case 0: return "static";
        case 1: return "tx";
        default: return "rx";
    }
}

}  // namespace

void write_paths(std::ostream& os, const PathSet& paths) {
    os << "# bdris paths v1\n";
    os << std::setprecision(17);
    const std::vector<Path>* lists[3] = {&paths.static_paths, &paths.tx_paths, &paths.rx_paths};
    for (int which = 0; which < 3; ++which) {
        for (const Path& p : *lists[which]) {
            os << link_tag(which) << ' ' << p.attenuation << ' ' << p.delay_s << ' '
               << p.azimuth_rad << ' ' << p.elevation_rad << '\n';
        }
    }
}

PathSet read_paths(std::istream& is) {
    PathSet out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        Path p;
        if (!(ss >> tag >> p.attenuation >> p.delay_s >> p.azimuth_rad >> p.elevation_rad))
            throw std::invalid_argument("read_paths: malformed record at line " + std::to_string(lineno));
        if (tag == "static")
            out.static_paths.push_back(p);
        else if (tag == "tx")
            out.tx_paths.push_back(p);
        else if (tag == "rx")
            out.rx_paths.push_back(p);
        else
            throw std::invalid_argument("read_paths: unknown link type '" + tag + "' at line " +
                                        std::to_string(lineno));
    }
    return out;
}

void write_paths_file(const std::string& path, const PathSet& paths) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_paths_file: cannot open " + path);
    write_paths(f, paths);
}

PathSet read_paths_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_paths_file: cannot open " + path);
    return read_paths(f);
}

}  // namespace bdris
