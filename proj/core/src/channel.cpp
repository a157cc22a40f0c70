// SPDX-License-Identifier: Apache-2.0
#include "bdris/channel.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace bdris {

void SystemParams::validate() const {
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("SystemParams: bandwidth must be positive");
    if (carrier_freq_hz / bandwidth_hz <= 10.0)
        throw std::invalid_argument("SystemParams: narrowband reflection model requires f_c/B > 10");
    if (num_subcarriers < 1) throw std::invalid_argument("SystemParams: need at least one subcarrier");
    if (num_taps < 0) throw std::invalid_argument("SystemParams: num_taps must be >= 0");
    if (num_subcarriers <= num_taps)
        throw std::invalid_argument("SystemParams: cyclic prefix requires S > T");
    if (clock_delay_s < 0.0 || !std::isfinite(clock_delay_s))
        throw std::invalid_argument("SystemParams: clock delay must be finite and >= 0");
    if (noise_power_w < 0.0) throw std::invalid_argument("SystemParams: noise power must be >= 0");
    grid.validate();
}

double normalized_sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

namespace {

// Trigamma psi_1(z) = sum_{k>=0} 1/(z+k)^2 for z > 0.
double trigamma(double z) {
    double acc = 0.0;
    while (z < 8.0) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    // Asymptotic series 1/z + 1/(2z^2) + 1/(6z^3) - 1/(30z^5) + 1/(42z^7) - 1/(30z^9)
    double tail = inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 - inv2 / 30.0)))));
    return acc + tail;
}

// Energy of a unit sinc kernel centered at offset x in taps l > T.
// sum_{l>T} sinc^2(l - x) = sin^2(pi x)/pi^2 * psi_1(T+1-x); the whole train
// sums to 1, so the value is capped at 1 when the peak is not yet covered.
double sinc_tail_one(double x, int num_taps) {
    const double z = num_taps + 1.0 - x;
    if (z <= 0.0) return 1.0;
    const double s = std::sin(M_PI * x);
    const double val = s * s / (M_PI * M_PI) * trigamma(z);
    return std::min(val, 1.0);
}

// Per-path (weight, normalized delay offset) pairs relative to eta.
struct PathKernels {
    std::vector<double> weight;  // alpha^2
    std::vector<double> offset;  // B * (delay - eta)
    double total_energy = 0.0;
};

PathKernels collect_kernels(const PathSet& paths, double bandwidth_hz, double clock_delay_s) {
    PathKernels k;
    auto add = [&](double amp, double delay) {
        k.weight.push_back(amp * amp);
        k.offset.push_back(bandwidth_hz * (delay - clock_delay_s));
        k.total_energy += amp * amp;
    };
    for (const Path& p : paths.static_paths) add(p.attenuation, p.delay_s);
    for (const Path& pr : paths.rx_paths)
        for (const Path& pt : paths.tx_paths)
            add(pr.attenuation * pt.attenuation, pr.delay_s + pt.delay_s);
    return k;
}

double tail_energy(const PathKernels& k, int num_taps) {
    double e = 0.0;
    for (std::size_t p = 0; p < k.weight.size(); ++p)
        e += k.weight[p] * sinc_tail_one(k.offset[p], num_taps);
    return e;
}

}  // namespace

double sinc_tail_energy(const PathSet& paths, double bandwidth_hz, double clock_delay_s,
                        int num_taps) {
    return tail_energy(collect_kernels(paths, bandwidth_hz, clock_delay_s), num_taps);
}

ClockAndLength choose_clock_and_length(const PathSet& paths, double bandwidth_hz,
                                       double energy_tol, int max_taps) {
    paths.validate();
    if (!(energy_tol > 0.0 && energy_tol < 1.0))
        throw std::invalid_argument("choose_clock_and_length: energy_tol must be in (0, 1)");
    if (bandwidth_hz <= 0.0)
        throw std::invalid_argument("choose_clock_and_length: bandwidth must be positive");

    ClockAndLength out;
    out.clock_delay_s = paths.min_end_to_end_delay();

    const PathKernels kernels = collect_kernels(paths, bandwidth_hz, out.clock_delay_s);
    const double budget = energy_tol * kernels.total_energy;
    if (kernels.total_energy == 0.0) {
        out.num_taps = 0;
        return out;
    }

    // tail_energy is non-increasing in T; find the smallest satisfying T by
    // doubling then bisecting.
    int hi = 1;
    while (tail_energy(kernels, hi) >= budget) {
        if (max_taps >= 0 && hi >= max_taps) {
            out.num_taps = max_taps;  // hard cap (cyclic prefix cannot exceed S-1)
            return out;
        }
        hi *= 2;
        if (max_taps >= 0) hi = std::min(hi, max_taps);
    }
    int lo = 0;  // smallest candidate
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (tail_energy(kernels, mid) < budget)
            hi = mid;
        else
            lo = mid + 1;
    }
    out.num_taps = lo;
    return out;
}

TapSet compute_taps(const PathSet& paths, const SystemParams& params) {
    paths.validate();
    params.validate();
    const double fc = params.carrier_freq_hz;
    const double bw = params.bandwidth_hz;
    const double eta = params.clock_delay_s;
    const int taps = params.num_taps;
    const int lt = static_cast<int>(paths.tx_paths.size());
    const int lr = static_cast<int>(paths.rx_paths.size());

    TapSet out;
    out.num_tx_paths = lt;
    out.num_rx_paths = lr;
    out.static_taps = Eigen::VectorXcd::Zero(taps + 1);
    out.cascaded_taps = Eigen::MatrixXcd::Zero(lt * lr, taps + 1);

    for (const Path& p : paths.static_paths) {
        const std::complex<double> phase = std::polar(p.attenuation, -2.0 * M_PI * fc * (p.delay_s - eta));
        for (int l = 0; l <= taps; ++l)
            out.static_taps(l) += phase * normalized_sinc(l + bw * (eta - p.delay_s));
    }
    for (int j = 0; j < lr; ++j) {
        const Path& pr = paths.rx_paths[j];
        for (int i = 0; i < lt; ++i) {
            const Path& pt = paths.tx_paths[i];
            const double delay = pr.delay_s + pt.delay_s;
            const std::complex<double> phase =
                std::polar(pr.attenuation * pt.attenuation, -2.0 * M_PI * fc * (delay - eta));
            for (int l = 0; l <= taps; ++l)
                out.cascaded_taps(i + lt * j, l) = phase * normalized_sinc(l + bw * (eta - delay));
        }
    }
    return out;
}

FrequencyCoeffs dft_coeffs(const TapSet& taps, int num_subcarriers) {
    const int t = taps.num_taps();
    if (num_subcarriers <= t)
        throw std::invalid_argument("dft_coeffs: need S > T (cyclic prefix shorter than block)");
    const int s = num_subcarriers;

    // Twiddle table exp(-j 2 pi k / S); indices reduced mod S keep the DFT
    // exact for any l*nu.
    Eigen::VectorXcd twiddle(s);
    for (int k = 0; k < s; ++k) twiddle(k) = std::polar(1.0, -2.0 * M_PI * k / s);

    FrequencyCoeffs out;
    out.num_tx_paths = taps.num_tx_paths;
    out.num_rx_paths = taps.num_rx_paths;
    out.static_coeffs = Eigen::VectorXcd::Zero(s);
    out.cascaded_coeffs = Eigen::MatrixXcd::Zero(taps.cascaded_taps.rows(), s);

    for (int nu = 0; nu < s; ++nu) {
        std::complex<double> acc = 0.0;
        for (int l = 0; l <= t; ++l) {
            const int k = static_cast<int>((static_cast<long long>(l) * nu) % s);
            acc += taps.static_taps(l) * twiddle(k);
        }
        out.static_coeffs(nu) = acc;
        auto col = out.cascaded_coeffs.col(nu);
        for (int l = 0; l <= t; ++l) {
            const int k = static_cast<int>((static_cast<long long>(l) * nu) % s);
            col.noalias() += taps.cascaded_taps.col(l) * twiddle(k);
        }
    }
    return out;
}

ArrayResponses array_responses(const PathSet& paths, const ElementGrid& grid,
                               double carrier_freq_hz) {
    ArrayResponses out;
    const int n = grid.size();
    out.incident.resize(n, static_cast<int>(paths.tx_paths.size()));
    out.outgoing.resize(n, static_cast<int>(paths.rx_paths.size()));
    for (std::size_t i = 0; i < paths.tx_paths.size(); ++i)
        out.incident.col(i) =
            array_response(grid, carrier_freq_hz, paths.tx_paths[i].azimuth_rad, paths.tx_paths[i].elevation_rad);
    for (std::size_t j = 0; j < paths.rx_paths.size(); ++j)
        out.outgoing.col(j) =
            array_response(grid, carrier_freq_hz, paths.rx_paths[j].azimuth_rad, paths.rx_paths[j].elevation_rad);
    return out;
}

Eigen::MatrixXcd SubcarrierChannel::matrix(int nu) const {
    return incident * coeff_matrix(nu) * outgoing.transpose();
}

SubcarrierChannel SubcarrierChannel::from_dense(Eigen::VectorXcd static_coeffs,
                                                const std::vector<Eigen::MatrixXcd>& matrices) {
    if (matrices.empty()) throw std::invalid_argument("from_dense: need at least one matrix");
    const int n = static_cast<int>(matrices.front().rows());
    if (matrices.front().cols() != n) throw std::invalid_argument("from_dense: matrices must be square");
    if (static_coeffs.size() != static_cast<Eigen::Index>(matrices.size()))
        throw std::invalid_argument("from_dense: static coefficient count must match matrix count");

    SubcarrierChannel chan;
    chan.static_coeffs = std::move(static_coeffs);
    chan.incident = Eigen::MatrixXcd::Identity(n, n);
    chan.outgoing = Eigen::MatrixXcd::Identity(n, n);
    chan.identity_responses = true;
    chan.cascaded_coeffs.resize(n * n, static_cast<Eigen::Index>(matrices.size()));
    for (std::size_t nu = 0; nu < matrices.size(); ++nu) {
        if (matrices[nu].rows() != n || matrices[nu].cols() != n)
            throw std::invalid_argument("from_dense: inconsistent matrix dimensions");
        chan.cascaded_coeffs.col(static_cast<Eigen::Index>(nu)) =
            Eigen::Map<const Eigen::VectorXcd>(matrices[nu].data(), n * n);
    }
    return chan;
}

SubcarrierChannel build_subcarrier_channel(const FrequencyCoeffs& freq,
                                           const ArrayResponses& responses) {
    if (responses.incident.cols() != freq.num_tx_paths ||
        responses.outgoing.cols() != freq.num_rx_paths)
        throw std::invalid_argument("build_subcarrier_channel: response/coefficient path counts differ");
    SubcarrierChannel chan;
    chan.static_coeffs = freq.static_coeffs;
    chan.cascaded_coeffs = freq.cascaded_coeffs;
    chan.incident = responses.incident;
    chan.outgoing = responses.outgoing;
    chan.identity_responses = false;
    return chan;
}

SubcarrierChannel build_channel(const PathSet& paths, const SystemParams& params) {
    const TapSet taps = compute_taps(paths, params);
    const FrequencyCoeffs freq = dft_coeffs(taps, params.num_subcarriers);
    const ArrayResponses resp = array_responses(paths, params.grid, params.carrier_freq_hz);
    return build_subcarrier_channel(freq, resp);
}

std::complex<double> channel_at(const Eigen::MatrixXcd& psi, const SubcarrierChannel& chan,
                                int nu) {
    const int n = chan.num_elements();
    if (psi.rows() != n || psi.cols() != n)
        throw std::invalid_argument("channel_at: reflection matrix dimension mismatch");
    if (nu < 0 || nu >= chan.num_subcarriers())
        throw std::invalid_argument("channel_at: subcarrier index out of range");
    // tr(Psi H_nu) = tr((outgoing^T Psi incident) C_nu)
    const Eigen::MatrixXcd m = chan.outgoing.transpose() * psi * chan.incident;
    return chan.static_coeffs(nu) + (m * chan.coeff_matrix(nu)).trace();
}

Eigen::VectorXd channel_gains(const Eigen::MatrixXcd& psi, const SubcarrierChannel& chan) {
    const int n = chan.num_elements();
    if (psi.rows() != n || psi.cols() != n)
        throw std::invalid_argument("channel_gains: reflection matrix dimension mismatch");
    const int s = chan.num_subcarriers();
    const Eigen::MatrixXcd m = chan.outgoing.transpose() * psi * chan.incident;  // L_r x L_t
    // tr(M C_nu) as a flat inner product against vec(C_nu).
    const Eigen::MatrixXcd mt = m.transpose();  // L_t x L_r, matches vec(C_nu) layout
    const Eigen::Map<const Eigen::VectorXcd> mvec(mt.data(), mt.size());
    Eigen::VectorXd gains(s);
    for (int nu = 0; nu < s; ++nu) {
        const std::complex<double> tr = mvec.cwiseProduct(chan.cascaded_coeffs.col(nu)).sum();
        gains(nu) = std::norm(chan.static_coeffs(nu) + tr);
    }
    return gains;
}

Eigen::MatrixXcd QuadraticAggregates::dense_matrix() const {
    if (basis.size() == 0) return core;
    return basis * core * basis.adjoint();
}

QuadraticAggregates QuadraticAggregates::from_dense(const Eigen::MatrixXcd& a, Eigen::VectorXcd b,
                                                    double const_term) {
    if (a.rows() != a.cols()) throw std::invalid_argument("QuadraticAggregates: A must be square");
    if (a.rows() != b.size()) throw std::invalid_argument("QuadraticAggregates: A/b dimension mismatch");
    QuadraticAggregates agg;
    agg.core = 0.5 * (a + a.adjoint());  // enforce Hermitian symmetry
    agg.b = std::move(b);
    agg.const_term = const_term;
    return agg;
}

QuadraticAggregates aggregate_quadratic(const SubcarrierChannel& chan) {
    QuadraticAggregates agg;
    // h_nu = vec(H_nu) = (outgoing (x) incident) vec(C_nu), so
    // h*_nu = basis * w_nu with basis = conj(outgoing) (x) conj(incident) and
    // w_nu = conj(vec(C_nu)).
    const Eigen::MatrixXcd w = chan.cascaded_coeffs.conjugate();
    agg.core.noalias() = w * w.adjoint();
    agg.core = 0.5 * (agg.core + agg.core.adjoint().eval());
    const Eigen::VectorXcd b_coeff = w * chan.static_coeffs;
    if (chan.identity_responses) {
        agg.b = b_coeff;  // basis is the identity
    } else {
        agg.basis = Eigen::kroneckerProduct(chan.outgoing.conjugate(), chan.incident.conjugate());
        agg.b = agg.basis * b_coeff;
    }
    agg.const_term = chan.static_coeffs.squaredNorm();
    return agg;
}

namespace {

std::complex<double> parse_complex(std::istringstream& ss, const char* what, int lineno) {
    double re = 0.0, im = 0.0;
    if (!(ss >> re >> im))
        throw std::invalid_argument(std::string("read_taps: malformed ") + what + " at line " +
                                    std::to_string(lineno));
    return {re, im};
}

}  // namespace

void write_taps(std::ostream& os, const TapSet& taps) {
    os << "# bdris taps v1\n";
    os << "meta num_taps " << taps.num_taps() << " num_tx_paths " << taps.num_tx_paths
       << " num_rx_paths " << taps.num_rx_paths << '\n';
    os << std::setprecision(17);
    for (int l = 0; l <= taps.num_taps(); ++l)
        os << "static_tap " << l << ' ' << taps.static_taps(l).real() << ' '
           << taps.static_taps(l).imag() << '\n';
    for (int j = 0; j < taps.num_rx_paths; ++j)
        for (int i = 0; i < taps.num_tx_paths; ++i)
            for (int l = 0; l <= taps.num_taps(); ++l) {
                const std::complex<double> c = taps.cascaded(i, j, l);
                os << "cascaded_tap " << i << ' ' << j << ' ' << l << ' ' << c.real() << ' '
                   << c.imag() << '\n';
            }
}

TapSet read_taps(std::istream& is) {
    TapSet out;
    bool have_meta = false;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "meta") {
            std::string key;
            int t = -1;
            out.num_tx_paths = out.num_rx_paths = 0;
            while (ss >> key) {
                int value = 0;
                if (!(ss >> value))
                    throw std::invalid_argument("read_taps: malformed meta at line " + std::to_string(lineno));
                if (key == "num_taps")
                    t = value;
                else if (key == "num_tx_paths")
                    out.num_tx_paths = value;
                else if (key == "num_rx_paths")
                    out.num_rx_paths = value;
            }
            if (t < 0 || out.num_tx_paths < 1 || out.num_rx_paths < 1)
                throw std::invalid_argument("read_taps: incomplete meta at line " + std::to_string(lineno));
            out.static_taps = Eigen::VectorXcd::Zero(t + 1);
            out.cascaded_taps = Eigen::MatrixXcd::Zero(out.num_tx_paths * out.num_rx_paths, t + 1);
            have_meta = true;
        } else if (tag == "static_tap") {
            if (!have_meta) throw std::invalid_argument("read_taps: record before meta line");
            int l = 0;
            if (!(ss >> l) || l < 0 || l > out.num_taps())
                throw std::invalid_argument("read_taps: bad tap index at line " + std::to_string(lineno));
            out.static_taps(l) = parse_complex(ss, "static_tap", lineno);
        } else if (tag == "cascaded_tap") {
            if (!have_meta) throw std::invalid_argument("read_taps: record before meta line");
            int i = 0, j = 0, l = 0;
            if (!(ss >> i >> j >> l) || i < 0 || i >= out.num_tx_paths || j < 0 ||
                j >= out.num_rx_paths || l < 0 || l > out.num_taps())
                throw std::invalid_argument("read_taps: bad cascaded index at line " + std::to_string(lineno));
            out.cascaded_taps(i + out.num_tx_paths * j, l) = parse_complex(ss, "cascaded_tap", lineno);
        } else {
            throw std::invalid_argument("read_taps: unknown record '" + tag + "' at line " +
                                        std::to_string(lineno));
        }
    }
    if (!have_meta) throw std::invalid_argument("read_taps: missing meta line");
    return out;
}

void write_taps_file(const std::string& path, const TapSet& taps) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_taps_file: cannot open " + path);
    write_taps(f, taps);
}

TapSet read_taps_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_taps_file: cannot open " + path);
    return read_taps(f);
}

}  // namespace bdris
