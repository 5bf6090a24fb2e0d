#pragma once

// Experiment runner behind the CLI: flat key-value configuration with the
// reference (Table-I) defaults, CSV result tables with an embedded config
// echo, and the four experiments reproducing the published curves.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mnpmc/channel_analytic.hpp"
#include "mnpmc/channel_sim.hpp"
#include "mnpmc/constants.hpp"
#include "mnpmc/link.hpp"
#include "mnpmc/validation.hpp"

namespace mnpmc {

/// Flat experiment configuration. Keys and defaults mirror the reference
/// parameter table; everything is SI.
struct ExperimentConfig {
    double eta = 1e-3;                      ///< fluid viscosity, kg/(m s)
    double temperature = 300.0;             ///< K
    double coating_thickness = 1e-9;        ///< R_c, m
    double mean_radius = 50e-9;             ///< m_R, m
    double sd_radius = 10e-9;               ///< s_R, m
    double saturation_magnetization = 5e5;  ///< M_s, A/m
    double field_gradient = 5.0;            ///< |dB/dz|, T/m
    double distance = 1e-3;                 ///< d, m
    double height = 10e-6;                  ///< h, m
    double receiver_width = 1e-4;           ///< c_x, m
    double receiver_height = 1e-6;          ///< c_z, m
    double flow_velocity = 5e-4;            ///< v_f, m/s
    double symbol_duration = 2.0;           ///< T, s
    double sample_offset = 2.0;             ///< t0 = d/v_f at the defaults, s
    std::int64_t threshold = 1;             ///< xi
    std::int64_t n_tx = 1000;               ///< particles per pulse
    std::int64_t sequence_length = 10;      ///< K
    std::int64_t n_terms = 500;
    double tail_tolerance = 1e-9;
    double dt = 2e-3;                       ///< s (the SER experiment uses 20 ms
                                            ///< unless dt is set explicitly)
    std::int64_t n_realizations = 10000;
    std::uint64_t seed = 1;

    bool dt_explicit = false;  ///< set when dt came from file or command line

    static const std::vector<std::string>& key_names() {
        static const std::vector<std::string> keys{
            "eta", "temperature", "coating_thickness", "mean_radius", "sd_radius",
            "saturation_magnetization", "field_gradient", "distance", "height",
            "receiver_width", "receiver_height", "flow_velocity", "symbol_duration",
            "sample_offset", "threshold", "n_tx", "sequence_length", "n_terms",
            "tail_tolerance", "dt", "n_realizations", "seed"};
        return keys;
    }

    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    void validate() const {
        scenario().validate();
        link().validate();
        sim().validate();
        series().validate();
    }

    Scenario scenario() const {
        Scenario s;
        s.geometry = ChannelGeometry{height, distance, receiver_width, receiver_height};
        s.fluid = FluidEnvironment{eta, temperature};
        s.field = MagnetField{field_gradient, 0.0};
        s.sizes = SizeDistribution{mean_radius, sd_radius};
        s.flow_speed = flow_velocity;
        s.coating_thickness = coating_thickness;
        s.saturation_magnetization = saturation_magnetization;
        return s;
    }

    LinkConfig link() const {
        return LinkConfig{symbol_duration, sample_offset, threshold, n_tx, sequence_length};
    }

    SimConfig sim() const { return SimConfig{dt, n_realizations, seed, 1}; }

    SeriesControl series() const {
        return SeriesControl{static_cast<int>(n_terms), tail_tolerance};
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": not a number: '" + value + "'");
    }
}

inline std::int64_t parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v)
        throw std::invalid_argument(key + ": not an integer: '" + value + "'");
    return i;
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "eta") eta = detail::parse_double(key, value);
    else if (key == "temperature") temperature = detail::parse_double(key, value);
    else if (key == "coating_thickness") coating_thickness = detail::parse_double(key, value);
    else if (key == "mean_radius") mean_radius = detail::parse_double(key, value);
    else if (key == "sd_radius") sd_radius = detail::parse_double(key, value);
    else if (key == "saturation_magnetization")
        saturation_magnetization = detail::parse_double(key, value);
    else if (key == "field_gradient") field_gradient = detail::parse_double(key, value);
    else if (key == "distance") distance = detail::parse_double(key, value);
    else if (key == "height") height = detail::parse_double(key, value);
    else if (key == "receiver_width") receiver_width = detail::parse_double(key, value);
    else if (key == "receiver_height") receiver_height = detail::parse_double(key, value);
    else if (key == "flow_velocity") flow_velocity = detail::parse_double(key, value);
    else if (key == "symbol_duration") symbol_duration = detail::parse_double(key, value);
    else if (key == "sample_offset") sample_offset = detail::parse_double(key, value);
    else if (key == "threshold") threshold = detail::parse_int(key, value);
    else if (key == "n_tx") n_tx = detail::parse_int(key, value);
    else if (key == "sequence_length") sequence_length = detail::parse_int(key, value);
    else if (key == "n_terms") n_terms = detail::parse_int(key, value);
    else if (key == "tail_tolerance") tail_tolerance = detail::parse_double(key, value);
    else if (key == "dt") { dt = detail::parse_double(key, value); dt_explicit = true; }
    else if (key == "n_realizations") n_realizations = detail::parse_int(key, value);
    else if (key == "seed") {
        try {
            seed = std::stoull(value);
        } catch (const std::exception&) {
            throw std::invalid_argument("seed: not an unsigned integer: '" + value + "'");
        }
    } else {
        throw std::invalid_argument("unknown configuration key: '" + key + "'");
    }
}

inline std::string ExperimentConfig::get(const std::string& key) const {
    if (key == "eta") return detail::format_number(eta);
    if (key == "temperature") return detail::format_number(temperature);
    if (key == "coating_thickness") return detail::format_number(coating_thickness);
    if (key == "mean_radius") return detail::format_number(mean_radius);
    if (key == "sd_radius") return detail::format_number(sd_radius);
    if (key == "saturation_magnetization") return detail::format_number(saturation_magnetization);
    if (key == "field_gradient") return detail::format_number(field_gradient);
    if (key == "distance") return detail::format_number(distance);
    if (key == "height") return detail::format_number(height);
    if (key == "receiver_width") return detail::format_number(receiver_width);
    if (key == "receiver_height") return detail::format_number(receiver_height);
    if (key == "flow_velocity") return detail::format_number(flow_velocity);
    if (key == "symbol_duration") return detail::format_number(symbol_duration);
    if (key == "sample_offset") return detail::format_number(sample_offset);
    if (key == "threshold") return std::to_string(threshold);
    if (key == "n_tx") return std::to_string(n_tx);
    if (key == "sequence_length") return std::to_string(sequence_length);
    if (key == "n_terms") return std::to_string(n_terms);
    if (key == "tail_tolerance") return detail::format_number(tail_tolerance);
    if (key == "dt") return detail::format_number(dt);
    if (key == "n_realizations") return std::to_string(n_realizations);
    if (key == "seed") return std::to_string(seed);
    throw std::invalid_argument("unknown configuration key: '" + key + "'");
}

/// Parses `key = value` lines; '#' starts a comment, blank lines ignored.
inline void apply_config_text(ExperimentConfig& config, std::istream& in) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        config.set(detail::trim(trimmed.substr(0, eq)), detail::trim(trimmed.substr(eq + 1)));
    }
}

inline void apply_config_file(ExperimentConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    apply_config_text(config, in);
}

/// `key=value` command-line override.
inline void apply_override(ExperimentConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got '" + assignment + "'");
    config.set(detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

/// Rectangular numeric table with '#'-prefixed metadata, serialized as CSV.
/// Rows may carry a leading string label (used by the validation report).
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::string> row_labels;  // empty or one label per row
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_metadata(const std::string& key, const std::string& value) {
        metadata.emplace_back(key, value);
    }

    void add_row(std::vector<double> row, const std::string& label = "") {
        if (row.size() + (label.empty() ? 0 : 1) != columns.size())
            throw std::invalid_argument("ResultTable: row width does not match columns");
        rows.push_back(std::move(row));
        if (!label.empty()) row_labels.push_back(label);
    }

    std::string to_csv() const {
        std::ostringstream out;
        for (const auto& [key, value] : metadata) {
            out << "# " << key << ": " << value << "\n";
        }
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << columns[c];
        }
        out << "\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::size_t c = 0;
            if (!row_labels.empty()) {
                out << row_labels[r];
                c = 1;
            }
            for (double v : rows[r]) {
                out << (c++ ? "," : "") << detail::format_number(v);
            }
            out << "\n";
        }
        return out.str();
    }
};

namespace detail {

inline void stamp_metadata(ResultTable& table, const ExperimentConfig& config,
                           const std::string& experiment) {
    table.add_metadata("experiment", experiment);
    table.add_metadata("mnpmc_version", mnpmc::version);
    table.add_metadata("seed", std::to_string(config.seed));
    for (const auto& key : ExperimentConfig::key_names()) {
        table.add_metadata("config." + key, config.get(key));
    }
}

inline std::string nm_label(double radius) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%gnm", radius * 1e9);
    return buf;
}

inline std::string tpm_label(double gradient) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%gTpm", gradient);
    return buf;
}

// Population mean of P_ob(t0) over the radius distribution, by a large
// fixed-seed sample. Reference curve for the SER sweep; a batch of only
// n_tx radii would carry visible draw noise at small n_tx.
inline double population_mean_prob(const Scenario& scenario, double t0,
                                   const SeriesControl& series, std::uint64_t seed) {
    if (scenario.sizes.sd_radius == 0.0) {
        return prob_obs(t0, scenario.geometry, scenario.nominal_transport(), series);
    }
    const int n = 200000;
    const auto radii = sample_release_radii(scenario.sizes, n, seed);
    double acc = 0.0;
    for (double r : radii) {
        acc += prob_obs(t0, scenario.geometry, scenario.transport_for(r), series);
    }
    return acc / n;
}

}  // namespace detail

/// Magnetization curves M(B) for core radii m_R - s_R, m_R, m_R + s_R on a
/// linear grid B in [0, 2 mT].
inline ResultTable run_magnetization_curve(const ExperimentConfig& config) {
    config.validate();
    const Scenario scenario = config.scenario();
    std::vector<double> radii{config.mean_radius - config.sd_radius, config.mean_radius,
                              config.mean_radius + config.sd_radius};
    if (config.sd_radius == 0.0) radii = {config.mean_radius};
    for (double r : radii) {
        if (!(r > 0.0))
            throw std::invalid_argument("sd_radius: radius grid must stay positive");
    }

    ResultTable table;
    detail::stamp_metadata(table, config, "magnetization");
    table.columns.push_back("field_T");
    for (double r : radii) table.columns.push_back("M_" + detail::nm_label(r));

    const int n_points = 101;  // includes B = 0 and the 0.2 / 1.0 mT marks
    for (int i = 0; i < n_points; ++i) {
        const double b = 2e-3 * i / (n_points - 1);
        std::vector<double> row{b};
        for (double r : radii) {
            row.push_back(magnetization(b, scenario.particle(r), scenario.fluid));
        }
        table.add_row(std::move(row));
    }
    return table;
}

/// Impulse response around t1 = d/v_f for field gradients {1, 2, 4} x the
/// configured one: analytic size-averaged, nominal, simulated mean with
/// standard error, and the equilibrium approximation for the base gradient.
inline ResultTable run_impulse_response(const ExperimentConfig& config) {
    config.validate();
    if (!(config.field_gradient > 0.0))
        throw std::invalid_argument("field_gradient: impulse sweep requires a positive gradient");
    const std::vector<double> gradients{config.field_gradient, 2.0 * config.field_gradient,
                                        4.0 * config.field_gradient};

    const double t1 = config.distance / config.flow_velocity;
    const double horizon = 1.25 * t1;
    SimConfig sim = config.sim();
    sim.record_interval = std::max<std::int64_t>(1, std::llround(0.01 / sim.time_step));

    ResultTable table;
    detail::stamp_metadata(table, config, "impulse");
    table.columns.push_back("time_s");
    for (double g : gradients) {
        const std::string tag = detail::tpm_label(g);
        table.columns.push_back("analytic_" + tag);
        table.columns.push_back("nominal_" + tag);
        table.columns.push_back("sim_mean_" + tag);
        table.columns.push_back("sim_stderr_" + tag);
    }
    table.columns.push_back("equilibrium_" + detail::tpm_label(gradients.front()));

    const SeriesControl series = config.series();
    Scenario scenario = config.scenario();
    const std::size_t n_tx = static_cast<std::size_t>(config.n_tx);

    std::vector<double> times;
    std::vector<std::vector<double>> per_gradient;  // 4 columns per gradient + equilibrium
    for (double g : gradients) {
        scenario.field.gradient_magnitude = g;
        const auto sim_series = simulate_impulse(scenario, n_tx, sim, horizon);
        if (times.empty()) times = sim_series.sample_times;

        const auto analytic = impulse_response(times, scenario, n_tx, sim.seed, series);
        Scenario nominal_scenario = scenario;
        nominal_scenario.sizes.sd_radius = 0.0;
        const auto nominal = impulse_response(times, nominal_scenario, n_tx, sim.seed, series);

        per_gradient.push_back(analytic.counts);
        per_gradient.push_back(nominal.counts);
        per_gradient.push_back(sim_series.mean_count);
        per_gradient.push_back(sim_series.stderr_count);
    }
    scenario.field.gradient_magnitude = gradients.front();
    const auto equilibrium =
        impulse_response(times, scenario, n_tx, sim.seed, series, /*equilibrium_approx=*/true);

    for (std::size_t j = 0; j < times.size(); ++j) {
        std::vector<double> row{times[j]};
        for (const auto& column : per_gradient) row.push_back(column[j]);
        row.push_back(equilibrium.counts[j]);
        table.add_row(std::move(row));
    }
    return table;
}

/// SER as a function of N_tx: closed form (no-ISI Poisson approximation)
/// with magnet on/off at two flow velocities, and the Monte Carlo estimate
/// with a 95% CI wherever the closed form predicts SER >= 5e-5 at the base
/// flow. The SER experiment defaults to dt = 20 ms unless dt was set.
inline ResultTable run_ser_sweep(const ExperimentConfig& config) {
    config.validate();
    const std::vector<std::int64_t> n_tx_grid{1,   2,   5,    10,   20,   50,  100,
                                              200, 500, 1000, 2000, 5000, 10000};
    const std::vector<double> flows{config.flow_velocity, 1.2 * config.flow_velocity};
    const std::vector<double> gradients{config.field_gradient, 0.0};

    SimConfig sim = config.sim();
    if (!config.dt_explicit) sim.time_step = 20e-3;

    ResultTable table;
    detail::stamp_metadata(table, config, "ser");
    table.add_metadata("mc_rows", "analytic SER >= 5e-5 at the base flow");
    table.columns.push_back("n_tx");
    for (double flow : flows) {
        for (double g : gradients) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "ser23_%s_vf%g", g > 0.0 ? "on" : "off", flow * 1e3);
            table.columns.push_back(buf);
        }
    }
    for (double g : gradients) {
        const std::string state = g > 0.0 ? "on" : "off";
        table.columns.push_back("mc_" + state);
        table.columns.push_back("mc_" + state + "_ci_low");
        table.columns.push_back("mc_" + state + "_ci_high");
    }

    const SeriesControl series = config.series();
    // population mean observation probability per (flow, magnet) pair
    std::vector<std::vector<double>> pbar(flows.size(), std::vector<double>(gradients.size()));
    for (std::size_t f = 0; f < flows.size(); ++f) {
        for (std::size_t g = 0; g < gradients.size(); ++g) {
            Scenario scenario = config.scenario();
            scenario.flow_speed = flows[f];
            scenario.field.gradient_magnitude = gradients[g];
            pbar[f][g] = detail::population_mean_prob(scenario, config.sample_offset, series,
                                                      config.seed);
        }
    }

    const double nan = std::nan("");
    for (std::int64_t n_tx : n_tx_grid) {
        std::vector<double> row{static_cast<double>(n_tx)};
        for (std::size_t f = 0; f < flows.size(); ++f) {
            for (std::size_t g = 0; g < gradients.size(); ++g) {
                row.push_back(ser_no_isi(static_cast<double>(n_tx) * pbar[f][g]));
            }
        }
        for (std::size_t g = 0; g < gradients.size(); ++g) {
            const double analytic = ser_no_isi(static_cast<double>(n_tx) * pbar[0][g]);
            if (analytic >= 5e-5) {
                Scenario scenario = config.scenario();
                scenario.field.gradient_magnitude = gradients[g];
                LinkConfig link = config.link();
                link.n_tx = n_tx;
                SimConfig row_sim = sim;
                row_sim.seed = stream_seed(config.seed,
                                           {static_cast<std::uint64_t>(n_tx), g});
                const auto est = ser_monte_carlo(link, scenario, row_sim, config.n_realizations);
                row.push_back(est.ser);
                row.push_back(est.ci_low);
                row.push_back(est.ci_high);
            } else {
                row.push_back(nan);
                row.push_back(nan);
                row.push_back(nan);
            }
        }
        table.add_row(std::move(row));
    }
    return table;
}

/// Cross-validation suite as a result table: one row per check with
/// pass/fail, the measured value, and its threshold.
inline ResultTable run_validate(const ExperimentConfig& config) {
    config.validate();
    const auto results =
        validation::run_invariant_suite(config.scenario(), config.series(), config.seed);

    ResultTable table;
    detail::stamp_metadata(table, config, "validate");
    table.columns = {"check", "pass", "measured", "threshold"};
    for (const auto& r : results) {
        table.add_row({r.pass ? 1.0 : 0.0, r.measured, r.threshold}, r.name);
        if (!r.note.empty()) table.add_metadata("note." + r.name, r.note);
    }
    return table;
}

inline bool all_checks_passed(const ResultTable& validate_table) {
    for (const auto& row : validate_table.rows) {
        if (row.at(0) == 0.0) return false;
    }
    return true;
}

}  // namespace mnpmc
