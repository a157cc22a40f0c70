// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "bdris/array_geometry.hpp"
#include "bdris/paths.hpp"

namespace bdris {

// System-level constants of the OFDM link.
struct SystemParams {
    double carrier_freq_hz = 0.0;  // f_c
    double bandwidth_hz = 0.0;     // B, also the symbol rate
    int num_subcarriers = 0;       // S
    int num_taps = 0;              // T, cyclic prefix length; S > T
    double clock_delay_s = 0.0;    // eta, receiver clock delay
    double noise_power_w = 0.0;    // N0, per-subcarrier noise power
    ElementGrid grid;              // RIS element layout

    int num_elements() const { return grid.size(); }
    void validate() const;
};

// Normalized sinc: sin(pi x) / (pi x), sinc(0) = 1.
double normalized_sinc(double x);

struct ClockAndLength {
    double clock_delay_s = 0.0;
    int num_taps = 0;
};

// Clock delay and filter length selection. eta is the minimum end-to-end
// delay over all static and cascaded paths, so tap 0 is anchored on the
// earliest arrival. T is the smallest integer such that the incoherent
// sinc-tail energy of all path kernels beyond tap T is below
// energy_tol * total tap energy, optionally capped at max_taps (pass the
// cyclic-prefix bound S-1; negative = uncapped).
ClockAndLength choose_clock_and_length(const PathSet& paths, double bandwidth_hz,
                                       double energy_tol, int max_taps = -1);

// Incoherent tail energy sum used by choose_clock_and_length: for each path
// kernel alpha * sinc(l - x) with x = B*(delay - eta), the energy in taps
// l > num_taps. Exact per path via sum_{l>T} sinc^2(l-x) =
// sin^2(pi x)/pi^2 * psi_1(T+1-x) with psi_1 the trigamma function.
double sinc_tail_energy(const PathSet& paths, double bandwidth_hz, double clock_delay_s,
                        int num_taps);

// Discrete-time channel coefficients.
struct TapSet {
    Eigen::VectorXcd static_taps;    // c_s[l], l = 0..T
    Eigen::MatrixXcd cascaded_taps;  // (L_t*L_r) x (T+1); column l stacks c_{i,j}[l]
                                     // column-major in (i, j): row = i + L_t*j
    int num_tx_paths = 0;
    int num_rx_paths = 0;

    int num_taps() const { return static_cast<int>(static_taps.size()) - 1; }
    std::complex<double> cascaded(int i, int j, int l) const {
        return cascaded_taps(i + num_tx_paths * j, l);
    }
    // c_{i,j}[l] as an L_t x L_r matrix.
    Eigen::Map<const Eigen::MatrixXcd> tap_matrix(int l) const {
        return {cascaded_taps.col(l).data(), num_tx_paths, num_rx_paths};
    }
};

// c_s[l] = sum_i alpha_i exp(-j 2 pi f_c (tau_i - eta)) sinc(l + B (eta - tau_i))
// c_{i,j}[l] = alpha_r_j alpha_t_i exp(-j 2 pi f_c (tau_r_j + tau_t_i - eta))
//              * sinc(l + B (eta - tau_r_j - tau_t_i))
TapSet compute_taps(const PathSet& paths, const SystemParams& params);

// Tap text serialization (same spirit as the path format).
void write_taps(std::ostream& os, const TapSet& taps);
TapSet read_taps(std::istream& is);
void write_taps_file(const std::string& path, const TapSet& taps);
TapSet read_taps_file(const std::string& path);

// Frequency-domain coefficients: S-point DFT of each zero-padded tap sequence,
// out[nu] = sum_l c[l] exp(-j 2 pi l nu / S).
struct FrequencyCoeffs {
    Eigen::VectorXcd static_coeffs;    // S
    Eigen::MatrixXcd cascaded_coeffs;  // (L_t*L_r) x S
    int num_tx_paths = 0;
    int num_rx_paths = 0;
};
FrequencyCoeffs dft_coeffs(const TapSet& taps, int num_subcarriers);

// Array response vectors of every RIS-side path direction.
struct ArrayResponses {
    Eigen::MatrixXcd incident;  // N x L_t, column i = a(phi_i, theta_i)
    Eigen::MatrixXcd outgoing;  // N x L_r, column j = a(phi_o, theta_o)
};
ArrayResponses array_responses(const PathSet& paths, const ElementGrid& grid,
                               double carrier_freq_hz);

// Per-subcarrier channel: static scalar h_nu and cascaded matrix
// H_nu = sum_{i,j} cbar_{i,j}[nu] a_in(i) a_out(j)^T, held in factored form
// H_nu = incident * C_nu * outgoing^T with C_nu an L_t x L_r coefficient
// matrix. A dense channel (tests, synthetic instances) uses identity
// responses so that C_nu is H_nu itself.
struct SubcarrierChannel {
    Eigen::VectorXcd static_coeffs;    // S
    Eigen::MatrixXcd cascaded_coeffs;  // (L_t*L_r) x S, column nu = vec(C_nu)
    Eigen::MatrixXcd incident;         // N x L_t
    Eigen::MatrixXcd outgoing;         // N x L_r
    bool identity_responses = false;

    int num_subcarriers() const { return static_cast<int>(static_coeffs.size()); }
    int num_elements() const { return static_cast<int>(incident.rows()); }
    int num_tx_paths() const { return static_cast<int>(incident.cols()); }
    int num_rx_paths() const { return static_cast<int>(outgoing.cols()); }

    Eigen::Map<const Eigen::MatrixXcd> coeff_matrix(int nu) const {
        return {cascaded_coeffs.col(nu).data(), num_tx_paths(), num_rx_paths()};
    }
    // Materialized H_nu (N x N).
    Eigen::MatrixXcd matrix(int nu) const;

    static SubcarrierChannel from_dense(Eigen::VectorXcd static_coeffs,
                                        const std::vector<Eigen::MatrixXcd>& matrices);
};

SubcarrierChannel build_subcarrier_channel(const FrequencyCoeffs& freq,
                                           const ArrayResponses& responses);

// Convenience: taps -> DFT -> responses -> SubcarrierChannel.
SubcarrierChannel build_channel(const PathSet& paths, const SystemParams& params);

// h_nu + tr(Psi H_nu). Psi must be N x N but is otherwise unconstrained
// (the zero matrix is permitted for testing).
std::complex<double> channel_at(const Eigen::MatrixXcd& psi, const SubcarrierChannel& chan,
                                int nu);

// |h_nu + tr(Psi H_nu)|^2 for every subcarrier, with the per-Psi factor
// outgoing^T Psi incident hoisted out of the subcarrier loop.
Eigen::VectorXd channel_gains(const Eigen::MatrixXcd& psi, const SubcarrierChannel& chan);

// Total-gain quadratic in psi = vec(Psi):
//   sum_nu |h_nu + h_nu^T psi|^2 = psi^H A psi + 2 Re(psi^H b) + const_term
// with A = sum_nu h*_nu h_nu^T (Hermitian PSD), b = sum_nu h_nu h*_nu and
// h_nu = vec(H_nu), vec column-major. A is held factored as
// basis * core * basis^H when the channel is path-factored (basis has
// L_t*L_r columns); an empty basis means A = core.
struct QuadraticAggregates {
    Eigen::MatrixXcd basis;  // n x r or empty
    Eigen::MatrixXcd core;   // r x r Hermitian PSD
    Eigen::VectorXcd b;      // n
    double const_term = 0.0;

    Eigen::Index dim() const { return b.size(); }
    Eigen::MatrixXcd dense_matrix() const;

    static QuadraticAggregates from_dense(const Eigen::MatrixXcd& a, Eigen::VectorXcd b,
                                          double const_term);
};

QuadraticAggregates aggregate_quadratic(const SubcarrierChannel& chan);

}  // namespace bdris
