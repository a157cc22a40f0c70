// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bdris/scenario.hpp"

namespace bdris {

inline constexpr const char* project_version = "0.1.0";

enum class Scheme { Algorithm1, Diagonal, StrongestTap, Random };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

enum class SweepAxis { Bandwidth, Kappa };

// Full experiment description. One sweep axis (bandwidth or Rician kappa);
// every other quantity is fixed across the sweep. All physical quantities
// carry their unit in the field (and config key) name.
struct ExperimentConfig {
    ScenarioConfig scenario;
    SweepAxis axis = SweepAxis::Bandwidth;
    std::vector<double> sweep_values{10e6, 20e6, 30e6, 40e6, 50e6};
    double bandwidth_hz = 30e6;  // fixed bandwidth for kappa sweeps
    double subcarrier_spacing_hz = 150e3;
    double psd_w_per_hz = 1e-6;  // transmit PSD; total power = psd * B
    double noise_psd_w_per_hz = 3.9810717055349694e-21;  // -174 dBm/Hz thermal
    double energy_tol = 1e-6;    // tap truncation threshold
    int num_realizations = 100;
    int power_iterations = 100;
    std::vector<Scheme> schemes{Scheme::Algorithm1, Scheme::Diagonal, Scheme::StrongestTap,
                                Scheme::Random};
    std::string output_path = "results.csv";
    std::string diagnostics_path;  // optional per-instance solver stage dump (TSV)
    int workers = 0;               // 0 = hardware concurrency

    void validate() const;
};

// Reference experiment presets:
//   1: capacity vs bandwidth, NLOS cascade, no static channel
//   2: capacity vs Rician kappa at 30 MHz, no static channel
//   3: capacity vs bandwidth with the 40 dB-weaker static channel, kappa = 0
ExperimentConfig figure_preset(int figure);

// JSON config I/O. Unknown keys are rejected; missing keys fall back to the
// defaults above. Validation failures name the offending field.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string serialize_experiment_config(const ExperimentConfig& config);

// FNV-1a hash of the canonical config serialization (excluding workers and
// output paths, which do not affect results).
std::uint64_t config_hash(const ExperimentConfig& config);

struct ResultRow {
    double sweep_value = 0.0;
    Scheme scheme = Scheme::Algorithm1;
    double mean_capacity_bps = 0.0;
    double std_error_bps = 0.0;
    int num_realizations = 0;  // successful realizations entering the mean
    double runtime_s = 0.0;
};

struct SolverTraceRow {
    double sweep_value = 0.0;
    int realization = 0;
    double relaxed_objective = 0.0;
    double projected_gain = 0.0;
    double refined_gain = 0.0;
    bool hard_case = false;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;  // one per (sweep value, scheme), sweep-major
    std::vector<double> sweep_values;
    std::vector<Scheme> schemes;
    SweepAxis axis = SweepAxis::Bandwidth;
    std::uint64_t master_seed = 0;
    std::uint64_t hash = 0;
    int failed_realizations = 0;
    std::vector<SolverTraceRow> solver_trace;  // filled when diagnostics requested
};

// Run the Monte-Carlo sweep. Realizations execute on a worker pool; the
// reduction is performed in realization-index order, so results are
// byte-identical for any worker count. Per-realization failures are logged
// to stderr and excluded from the averages.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Result table: '#'-prefixed metadata header (version, config hash, seed)
// followed by comma-separated rows, 12 significant digits.
void write_result_table(std::ostream& os, const ExperimentResult& result);
void write_result_table_file(const std::string& path, const ExperimentResult& result);

// Per-figure plot data: tab-separated, header row, one line per sweep value,
// one capacity column per scheme.
void emit_plot_data(std::ostream& os, const ExperimentResult& result);
void emit_plot_data_file(const std::string& path, const ExperimentResult& result);

void write_solver_trace_file(const std::string& path, const ExperimentResult& result);

}  // namespace bdris
