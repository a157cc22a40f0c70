// SPDX-License-Identifier: Apache-2.0
#include "bdris/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "bdris/baselines.hpp"
#include "bdris/capacity.hpp"
#include "bdris/channel.hpp"
#include "bdris/rng.hpp"
#include "bdris/solver.hpp"

namespace bdris {

using nlohmann::json;

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Algorithm1: return "algorithm1";
        case Scheme::Diagonal: return "diagonal";
        case Scheme::StrongestTap: return "strongest_tap";
        default: return "random";
    }
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "algorithm1") return Scheme::Algorithm1;
    if (name == "diagonal") return Scheme::Diagonal;
    if (name == "strongest_tap") return Scheme::StrongestTap;
    if (name == "random") return Scheme::Random;
    throw std::invalid_argument("config: unknown scheme '" + name + "'");
}

void ExperimentConfig::validate() const {
    scenario.validate();
    if (sweep_values.empty()) throw std::invalid_argument("config: sweep list must be nonempty");
    if (axis == SweepAxis::Bandwidth) {
        for (double b : sweep_values)
            if (b <= 0.0) throw std::invalid_argument("config: sweep bandwidth_hz values must be positive");
    } else {
        for (double k : sweep_values)
            if (k < 0.0) throw std::invalid_argument("config: sweep kappa values must be >= 0");
        if (bandwidth_hz <= 0.0) throw std::invalid_argument("config: bandwidth_hz must be positive");
    }
    if (subcarrier_spacing_hz <= 0.0)
        throw std::invalid_argument("config: subcarrier_spacing_hz must be positive");
    if (psd_w_per_hz <= 0.0) throw std::invalid_argument("config: psd_w_per_hz must be positive");
    if (noise_psd_w_per_hz <= 0.0)
        throw std::invalid_argument("config: noise_psd_w_per_hz must be positive");
    if (!(energy_tol > 0.0 && energy_tol < 1.0))
        throw std::invalid_argument("config: energy_tol must lie in (0, 1)");
    if (num_realizations < 1)
        throw std::invalid_argument("config: num_realizations must be >= 1");
    if (power_iterations < 1)
        throw std::invalid_argument("config: power_iterations must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("config: schemes must be nonempty");
    if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");
    const double min_bw =
        axis == SweepAxis::Bandwidth
            ? *std::min_element(sweep_values.begin(), sweep_values.end())
            : bandwidth_hz;
    if (std::lround(min_bw / subcarrier_spacing_hz) < 1)
        throw std::invalid_argument("config: bandwidth below one subcarrier spacing");
}

ExperimentConfig figure_preset(int figure) {
    ExperimentConfig cfg;
    switch (figure) {
        case 1:
            cfg.axis = SweepAxis::Bandwidth;
            cfg.sweep_values = {10e6, 20e6, 30e6, 40e6, 50e6};
            cfg.scenario.rician_kappa = 0.0;
            cfg.scenario.num_static_paths = 0;
            cfg.output_path = "fig1.csv";
            break;
        case 2:
            cfg.axis = SweepAxis::Kappa;
            cfg.sweep_values = {0.0, 1.0, 10.0, 100.0};
            cfg.bandwidth_hz = 30e6;
            cfg.scenario.num_static_paths = 0;
            cfg.output_path = "fig2.csv";
            break;
        case 3:
            cfg.axis = SweepAxis::Bandwidth;
            cfg.sweep_values = {10e6, 20e6, 30e6, 40e6, 50e6};
            cfg.scenario.rician_kappa = 0.0;
            cfg.scenario.num_static_paths = 6;
            cfg.scenario.static_gain_offset_db = -40.0;
            cfg.output_path = "fig3.csv";
            break;
        default:
            throw std::invalid_argument("figure_preset: figure must be 1, 2 or 3");
    }
    return cfg;
}

namespace {

[[noreturn]] void bad_field(const std::string& key, const char* why) {
    throw std::invalid_argument("config: field '" + key + "' " + why);
}

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_field(key, "has the wrong type");
    }
}

Eigen::Vector3d get_vec3(const json& j, const std::string& key, const Eigen::Vector3d& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 3) bad_field(key, "must be a 3-element array");
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) bad_field(key, "must contain numbers");
        out(i) = v[i].get<double>();
    }
    return out;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument("config: unknown key '" + context + it.key() + "'");
    }
}

ScenarioConfig parse_scenario(const json& j) {
    reject_unknown_keys(j,
                        {"tx_position_m", "rx_position_m", "ris_center_m", "carrier_freq_hz",
                         "ris_rows", "ris_cols", "element_spacing_m", "num_tx_paths",
                         "num_rx_paths", "num_static_paths", "rician_kappa",
                         "static_gain_offset_db", "delay_spread_s", "angular_spread_deg",
                         "path_excess_loss_db"},
                        "scenario.");
    ScenarioConfig s;
    s.tx_position_m = get_vec3(j, "tx_position_m", s.tx_position_m);
    s.rx_position_m = get_vec3(j, "rx_position_m", s.rx_position_m);
    s.ris_center_m = get_vec3(j, "ris_center_m", s.ris_center_m);
    s.carrier_freq_hz = get_field(j, "carrier_freq_hz", s.carrier_freq_hz);
    s.grid.rows = get_field(j, "ris_rows", s.grid.rows);
    s.grid.cols = get_field(j, "ris_cols", s.grid.cols);
    s.grid.spacing_m = get_field(j, "element_spacing_m", s.grid.spacing_m);
    s.num_tx_paths = get_field(j, "num_tx_paths", s.num_tx_paths);
    s.num_rx_paths = get_field(j, "num_rx_paths", s.num_rx_paths);
    s.num_static_paths = get_field(j, "num_static_paths", s.num_static_paths);
    s.rician_kappa = get_field(j, "rician_kappa", s.rician_kappa);
    s.static_gain_offset_db = get_field(j, "static_gain_offset_db", s.static_gain_offset_db);
    s.delay_spread_s = get_field(j, "delay_spread_s", s.delay_spread_s);
    s.angular_spread_rad =
        get_field(j, "angular_spread_deg", s.angular_spread_rad * 180.0 / M_PI) * M_PI / 180.0;
    s.path_excess_loss_db = get_field(j, "path_excess_loss_db", s.path_excess_loss_db);
    return s;
}

json scenario_to_json(const ScenarioConfig& s) {
    json j;
    j["tx_position_m"] = {s.tx_position_m.x(), s.tx_position_m.y(), s.tx_position_m.z()};
    j["rx_position_m"] = {s.rx_position_m.x(), s.rx_position_m.y(), s.rx_position_m.z()};
    j["ris_center_m"] = {s.ris_center_m.x(), s.ris_center_m.y(), s.ris_center_m.z()};
    j["carrier_freq_hz"] = s.carrier_freq_hz;
    j["ris_rows"] = s.grid.rows;
    j["ris_cols"] = s.grid.cols;
    j["element_spacing_m"] = s.grid.spacing_m;
    j["num_tx_paths"] = s.num_tx_paths;
    j["num_rx_paths"] = s.num_rx_paths;
    j["num_static_paths"] = s.num_static_paths;
    j["rician_kappa"] = s.rician_kappa;
    j["static_gain_offset_db"] = s.static_gain_offset_db;
    j["delay_spread_s"] = s.delay_spread_s;
    j["angular_spread_deg"] = s.angular_spread_rad * 180.0 / M_PI;
    j["path_excess_loss_db"] = s.path_excess_loss_db;
    return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    reject_unknown_keys(j,
                        {"scenario", "sweep", "bandwidth_hz", "subcarrier_spacing_hz",
                         "psd_w_per_hz", "noise_psd_w_per_hz", "energy_tol", "num_realizations",
                         "power_iterations", "schemes", "master_seed", "workers", "output_path",
                         "diagnostics_path"},
                        "");

    ExperimentConfig cfg;
    if (j.contains("scenario")) cfg.scenario = parse_scenario(j.at("scenario"));

    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        reject_unknown_keys(sw, {"bandwidth_hz", "kappa"}, "sweep.");
        const bool has_bw = sw.contains("bandwidth_hz");
        const bool has_kappa = sw.contains("kappa");
        if (has_bw == has_kappa)
            throw std::invalid_argument(
                "config: sweep must contain exactly one of 'bandwidth_hz', 'kappa'");
        const std::string key = has_bw ? "bandwidth_hz" : "kappa";
        cfg.axis = has_bw ? SweepAxis::Bandwidth : SweepAxis::Kappa;
        cfg.sweep_values = get_field(sw, key, std::vector<double>{});
    }
    cfg.bandwidth_hz = get_field(j, "bandwidth_hz", cfg.bandwidth_hz);
    cfg.subcarrier_spacing_hz = get_field(j, "subcarrier_spacing_hz", cfg.subcarrier_spacing_hz);
    cfg.psd_w_per_hz = get_field(j, "psd_w_per_hz", cfg.psd_w_per_hz);
    cfg.noise_psd_w_per_hz = get_field(j, "noise_psd_w_per_hz", cfg.noise_psd_w_per_hz);
    cfg.energy_tol = get_field(j, "energy_tol", cfg.energy_tol);
    cfg.num_realizations = get_field(j, "num_realizations", cfg.num_realizations);
    cfg.power_iterations = get_field(j, "power_iterations", cfg.power_iterations);
    if (j.contains("schemes")) {
        cfg.schemes.clear();
        for (const std::string& name : get_field(j, "schemes", std::vector<std::string>{}))
            cfg.schemes.push_back(scheme_from_name(name));
    }
    cfg.scenario.master_seed = get_field(j, "master_seed", cfg.scenario.master_seed);
    cfg.workers = get_field(j, "workers", cfg.workers);
    cfg.output_path = get_field(j, "output_path", cfg.output_path);
    cfg.diagnostics_path = get_field(j, "diagnostics_path", cfg.diagnostics_path);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
    json j;
    j["scenario"] = scenario_to_json(cfg.scenario);
    j["sweep"] =
        json{{cfg.axis == SweepAxis::Bandwidth ? "bandwidth_hz" : "kappa", cfg.sweep_values}};
    j["bandwidth_hz"] = cfg.bandwidth_hz;
    j["subcarrier_spacing_hz"] = cfg.subcarrier_spacing_hz;
    j["psd_w_per_hz"] = cfg.psd_w_per_hz;
    j["noise_psd_w_per_hz"] = cfg.noise_psd_w_per_hz;
    j["energy_tol"] = cfg.energy_tol;
    j["num_realizations"] = cfg.num_realizations;
    j["power_iterations"] = cfg.power_iterations;
    std::vector<std::string> names;
    for (Scheme s : cfg.schemes) names.emplace_back(scheme_name(s));
    j["schemes"] = names;
    j["master_seed"] = cfg.scenario.master_seed;
    j["workers"] = cfg.workers;
    j["output_path"] = cfg.output_path;
    j["diagnostics_path"] = cfg.diagnostics_path;
    return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    ExperimentConfig canonical = cfg;
    canonical.workers = 0;
    canonical.output_path.clear();
    canonical.diagnostics_path.clear();
    const std::string text = serialize_experiment_config(canonical);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

struct RealizationOutcome {
    std::vector<double> capacity_bps;  // per scheme, NaN on failure
    std::vector<double> runtime_s;     // per scheme
    SolverTraceRow trace;
    bool failed = false;
    bool gain_regression = false;
    std::string error;
};

// One (sweep value, realization) unit of work.
RealizationOutcome run_one(const ExperimentConfig& cfg, const ScenarioConfig& scen,
                           double bandwidth_hz, std::uint64_t realization) {
    RealizationOutcome out;
    const std::size_t n_schemes = cfg.schemes.size();
    out.capacity_bps.assign(n_schemes, std::numeric_limits<double>::quiet_NaN());
    out.runtime_s.assign(n_schemes, 0.0);
    try {
        const Realization real = generate(scen, realization);
        const int s_count =
            static_cast<int>(std::lround(bandwidth_hz / cfg.subcarrier_spacing_hz));
        if (s_count < 1) throw std::runtime_error("bandwidth below one subcarrier");
        const ClockAndLength cl =
            choose_clock_and_length(real.paths, bandwidth_hz, cfg.energy_tol, s_count - 1);

        SystemParams params;
        params.carrier_freq_hz = scen.carrier_freq_hz;
        params.bandwidth_hz = bandwidth_hz;
        params.num_subcarriers = s_count;
        params.num_taps = cl.num_taps;
        params.clock_delay_s = cl.clock_delay_s;
        params.noise_power_w = cfg.noise_psd_w_per_hz * cfg.subcarrier_spacing_hz;
        params.grid = ElementGrid{scen.grid.rows, scen.grid.cols, scen.element_spacing_m()};

        const TapSet taps = compute_taps(real.paths, params);
        const FrequencyCoeffs freq = dft_coeffs(taps, s_count);
        const ArrayResponses resp =
            array_responses(real.paths, params.grid, params.carrier_freq_hz);
        const SubcarrierChannel chan = build_subcarrier_channel(freq, resp);

        const double q = cfg.psd_w_per_hz * bandwidth_hz / s_count;

        double gain_alg1 = -1.0, gain_diag = -1.0;
        for (std::size_t k = 0; k < n_schemes; ++k) {
            const auto t0 = std::chrono::steady_clock::now();
            ReflectionMatrix psi = [&]() {
                switch (cfg.schemes[k]) {
                    case Scheme::Algorithm1: {
                        SolveDiagnostics diag;
                        ReflectionMatrix m = optimize(chan, cfg.power_iterations, &diag);
                        out.trace.relaxed_objective = diag.relaxed_objective;
                        out.trace.projected_gain = diag.projected_gain;
                        out.trace.refined_gain = diag.refined_gain;
                        out.trace.hard_case = diag.hard_case;
                        gain_alg1 = diag.refined_gain;
                        return m;
                    }
                    case Scheme::Diagonal: {
                        ReflectionMatrix m = diagonal_power_iteration(chan, cfg.power_iterations);
                        gain_diag = total_gain(m.matrix(), chan);
                        return m;
                    }
                    case Scheme::StrongestTap:
                        return strongest_tap(taps, chan);
                    default:
                        return random_bd(chan, derive_stream_seed(real.seed, 0x52414e44u),
                                         cfg.power_iterations);
                }
            }();
            const CapacityResult cap = evaluate_capacity(psi, chan, params, q);
            out.capacity_bps[k] = cap.capacity_bps;
            out.runtime_s[k] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        // A diagonal unit-modulus matrix is a feasible beyond-diagonal point,
        // so the optimized scheme falling below it indicates a regression.
        if (gain_alg1 >= 0.0 && gain_diag >= 0.0 && gain_alg1 < gain_diag * (1.0 - 1e-9))
            out.gain_regression = true;
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    ExperimentResult result;
    result.sweep_values = cfg.sweep_values;
    result.schemes = cfg.schemes;
    result.axis = cfg.axis;
    result.master_seed = cfg.scenario.master_seed;
    result.hash = config_hash(cfg);

    const int n_real = cfg.num_realizations;
    unsigned worker_count = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                            : std::max(1u, std::thread::hardware_concurrency());
    worker_count = std::min<unsigned>(worker_count, static_cast<unsigned>(n_real));

    for (double value : cfg.sweep_values) {
        ScenarioConfig scen = cfg.scenario;
        double bandwidth = cfg.bandwidth_hz;
        if (cfg.axis == SweepAxis::Bandwidth)
            bandwidth = value;
        else
            scen.rician_kappa = value;

        std::vector<RealizationOutcome> outcomes(n_real);
        std::atomic<int> next{0};
        auto work = [&]() {
            for (int k = next.fetch_add(1); k < n_real; k = next.fetch_add(1))
                outcomes[k] = run_one(cfg, scen, bandwidth, static_cast<std::uint64_t>(k));
        };
        if (worker_count <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(work);
            for (std::thread& t : pool) t.join();
        }

        // Deterministic reduction in realization order.
        for (std::size_t k_scheme = 0; k_scheme < cfg.schemes.size(); ++k_scheme) {
            double sum = 0.0, sum_sq = 0.0, runtime = 0.0;
            int count = 0;
            for (int k = 0; k < n_real; ++k) {
                if (outcomes[k].failed) continue;
                const double c = outcomes[k].capacity_bps[k_scheme];
                sum += c;
                sum_sq += c * c;
                runtime += outcomes[k].runtime_s[k_scheme];
                ++count;
            }
            ResultRow row;
            row.sweep_value = value;
            row.scheme = cfg.schemes[k_scheme];
            row.num_realizations = count;
            row.runtime_s = runtime;
            if (count > 0) {
                row.mean_capacity_bps = sum / count;
                if (count > 1) {
                    const double var =
                        std::max(0.0, (sum_sq - sum * sum / count) / (count - 1));
                    row.std_error_bps = std::sqrt(var / count);
                }
            }
            result.rows.push_back(row);
        }

        int failures_here = 0;
        int regressions = 0;
        for (int k = 0; k < n_real; ++k) {
            if (outcomes[k].failed) {
                ++failures_here;
                std::cerr << "warning: realization " << k << " at sweep value " << value
                          << " failed: " << outcomes[k].error << '\n';
            }
            if (outcomes[k].gain_regression) ++regressions;
            if (!cfg.diagnostics_path.empty() && !outcomes[k].failed) {
                SolverTraceRow trace = outcomes[k].trace;
                trace.sweep_value = value;
                trace.realization = k;
                result.solver_trace.push_back(trace);
            }
        }
        result.failed_realizations += failures_here;
        if (regressions > 0)
            std::cerr << "warning: optimized reflection below the diagonal baseline gain in "
                      << regressions << " realization(s) at sweep value " << value << '\n';
    }
    return result;
}

namespace {

const char* axis_name(SweepAxis axis) {
    return axis == SweepAxis::Bandwidth ? "bandwidth_hz" : "kappa";
}

std::ostream& fmt(std::ostream& os) {
    os << std::setprecision(12);
    return os;
}

}  // namespace

void write_result_table(std::ostream& os, const ExperimentResult& result) {
    os << "# bdris results v1\n";
    os << "# version=" << project_version << '\n';
    os << "# config_hash=" << std::hex << result.hash << std::dec << '\n';
    os << "# master_seed=" << result.master_seed << '\n';
    os << "# sweep_axis=" << axis_name(result.axis) << '\n';
    if (result.failed_realizations > 0)
        os << "# failed_realizations=" << result.failed_realizations << '\n';
    os << "sweep_value,scheme,mean_capacity_bps,std_error_bps,num_realizations,runtime_s\n";
    for (const ResultRow& r : result.rows) {
        fmt(os) << r.sweep_value << ',' << scheme_name(r.scheme) << ',' << r.mean_capacity_bps
                << ',' << r.std_error_bps << ',' << r.num_realizations << ',' << r.runtime_s
                << '\n';
    }
}

void write_result_table_file(const std::string& path, const ExperimentResult& result) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_result_table: cannot open " + path);
    write_result_table(f, result);
}

void emit_plot_data(std::ostream& os, const ExperimentResult& result) {
    os << axis_name(result.axis);
    for (Scheme s : result.schemes) os << '\t' << scheme_name(s);
    os << '\n';
    for (std::size_t i = 0; i < result.sweep_values.size(); ++i) {
        fmt(os) << result.sweep_values[i];
        for (std::size_t k = 0; k < result.schemes.size(); ++k) {
            const ResultRow& row = result.rows.at(i * result.schemes.size() + k);
            fmt(os) << '\t' << row.mean_capacity_bps;
        }
        os << '\n';
    }
}

void emit_plot_data_file(const std::string& path, const ExperimentResult& result) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("emit_plot_data: cannot open " + path);
    emit_plot_data(f, result);
}

void write_solver_trace_file(const std::string& path, const ExperimentResult& result) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_solver_trace: cannot open " + path);
    f << "sweep_value\trealization\trelaxed_objective\tprojected_gain\trefined_gain\thard_case\n";
    for (const SolverTraceRow& t : result.solver_trace) {
        fmt(f) << t.sweep_value << '\t' << t.realization << '\t' << t.relaxed_objective << '\t'
               << t.projected_gain << '\t' << t.refined_gain << '\t' << (t.hard_case ? 1 : 0)
               << '\n';
    }
}

}  // namespace bdris
