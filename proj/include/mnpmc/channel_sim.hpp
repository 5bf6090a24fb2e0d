#pragma once

// Particle-based Monte Carlo simulation of the channel: discrete-time
// Brownian motion with flow and magnetic drift, reflective walls, and
// transparent-receiver counting. Ground truth for the analytic module.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mnpmc/channel.hpp"
#include "mnpmc/rng.hpp"

namespace mnpmc {

struct SimConfig {
    double time_step;              ///< dt, s
    std::int64_t n_realizations;   ///< independent repetitions
    std::uint64_t seed;
    std::int64_t record_interval = 1; ///< record every this many steps

    void validate() const {
        if (!(time_step > 0.0)) throw std::invalid_argument("sim.time_step must be > 0");
        if (n_realizations < 1) throw std::invalid_argument("sim.n_realizations must be >= 1");
        if (record_interval < 1) throw std::invalid_argument("sim.record_interval must be >= 1");
    }
};

/// Tracked state of one particle with its cached transport coefficients.
struct ParticleState {
    double x;
    double z;
    double core_radius;
    double diffusion;      ///< D of this radius
    double magnetic_drift; ///< v_m of this radius
};

/// Receiver counts over time, averaged over realizations.
struct ObservationSeries {
    std::vector<double> sample_times;
    std::vector<double> mean_count;
    std::vector<double> stderr_count;
};

namespace detail {

/// Repeated reflection at z = 0 and z = h until the point is inside.
inline double fold_into_channel(double z, double height) {
    while (z < 0.0 || z > height) {
        z = z < 0.0 ? -z : 2.0 * height - z;
    }
    return z;
}

}  // namespace detail

/// One Euler step: independent Gaussian displacements in x and z on top of
/// the deterministic flow and magnetic drift, then reflection into [0, h].
inline ParticleState step_particle(ParticleState p, double dt, double flow_speed, double height,
                                   std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    const double sigma = std::sqrt(2.0 * p.diffusion * dt);
    p.x += -flow_speed * dt + sigma * normal(rng);
    p.z += -p.magnetic_drift * dt + sigma * normal(rng);
    p.z = detail::fold_into_channel(p.z, height);
    return p;
}

/// Releases n_tx particles at (d, z0) at t = 0 and counts how many lie
/// inside the receiver at each recorded time, averaged over
/// sim.n_realizations independent realizations.
///
/// The batch of core radii is drawn once from the seed (shared with the
/// analytic impulse response for paired comparison) and reused by every
/// realization; the per-step noise uses one substream per
/// (seed, realization, particle), so results do not depend on the degree
/// of parallelism.
///
/// z is advanced every time step because the reflecting walls make its law
/// depend on the step granularity. x never meets a boundary, so between
/// recorded instants it takes one aggregated Gaussian jump distributed
/// exactly as the sum of the per-step increments.
inline ObservationSeries simulate_impulse(const Scenario& scenario, std::size_t n_tx,
                                          const SimConfig& sim, double horizon) {
    scenario.validate();
    sim.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_impulse requires horizon > 0");

    const double dt = sim.time_step;
    const double h = scenario.geometry.height;
    const double z0 = scenario.geometry.release_height();
    const double d = scenario.geometry.tx_distance;
    const std::int64_t total_steps = static_cast<std::int64_t>(std::llround(horizon / dt));

    ObservationSeries out;
    std::vector<std::int64_t> record_steps;
    for (std::int64_t m = sim.record_interval; m <= total_steps; m += sim.record_interval) {
        record_steps.push_back(m);
        out.sample_times.push_back(static_cast<double>(m) * dt);
    }
    const std::size_t n_samples = record_steps.size();
    out.mean_count.assign(n_samples, 0.0);
    out.stderr_count.assign(n_samples, 0.0);
    if (n_samples == 0) return out;

    const auto radii = sample_release_radii(scenario.sizes, n_tx, sim.seed);
    std::vector<double> diffusion(n_tx), drift(n_tx);
    for (std::size_t i = 0; i < n_tx; ++i) {
        const TransportParams tp = scenario.transport_for(radii[i]);
        diffusion[i] = tp.diffusion;
        drift[i] = tp.magnetic_drift;
    }

    const std::int64_t n_real = sim.n_realizations;
    std::vector<double> counts(static_cast<std::size_t>(n_real) * n_samples, 0.0);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t r = 0; r < n_real; ++r) {
        double* row = counts.data() + static_cast<std::size_t>(r) * n_samples;
        for (std::size_t i = 0; i < n_tx; ++i) {
            auto rng = substream(sim.seed, {stream_tag::impulse,
                                            static_cast<std::uint64_t>(r), i});
            std::normal_distribution<double> normal;
            const double sigma_step = std::sqrt(2.0 * diffusion[i] * dt);
            double x = d;
            double z = z0;
            std::int64_t step = 0;
            for (std::size_t j = 0; j < n_samples; ++j) {
                const std::int64_t target = record_steps[j];
                for (; step < target; ++step) {
                    z += -drift[i] * dt + sigma_step * normal(rng);
                    z = detail::fold_into_channel(z, h);
                }
                const double elapsed = static_cast<double>(target - (j == 0 ? 0 : record_steps[j - 1])) * dt;
                x += -scenario.flow_speed * elapsed +
                     std::sqrt(2.0 * diffusion[i] * elapsed) * normal(rng);
                if (scenario.geometry.inside_receiver(x, z)) row[j] += 1.0;
            }
        }
    }

    for (std::int64_t r = 0; r < n_real; ++r) {
        for (std::size_t j = 0; j < n_samples; ++j) {
            out.mean_count[j] += counts[static_cast<std::size_t>(r) * n_samples + j];
        }
    }
    for (double& m : out.mean_count) m /= static_cast<double>(n_real);
    if (n_real > 1) {
        for (std::size_t j = 0; j < n_samples; ++j) {
            double ss = 0.0;
            for (std::int64_t r = 0; r < n_real; ++r) {
                const double dev =
                    counts[static_cast<std::size_t>(r) * n_samples + j] - out.mean_count[j];
                ss += dev * dev;
            }
            out.stderr_count[j] =
                std::sqrt(ss / static_cast<double>(n_real - 1) / static_cast<double>(n_real));
        }
    }
    return out;
}

/// Simulates one OOK sequence: for every b[k] = 1 a fresh batch of n_tx
/// particles (independent radii per pulse) is released at time k T; all
/// live particles propagate concurrently, and the receiver count is taken
/// at the step nearest k T + t0 for every symbol k.
inline std::vector<std::int64_t> simulate_sequence(const std::vector<int>& bits,
                                                   double symbol_duration, double sample_offset,
                                                   std::size_t n_tx, const Scenario& scenario,
                                                   const SimConfig& sim) {
    scenario.validate();
    sim.validate();
    if (bits.empty()) throw std::invalid_argument("simulate_sequence requires nonempty bits");
    if (!(symbol_duration > 0.0))
        throw std::invalid_argument("simulate_sequence requires symbol_duration > 0");
    if (!(sample_offset > 0.0))
        throw std::invalid_argument("simulate_sequence requires sample_offset > 0");

    const double dt = sim.time_step;
    const double h = scenario.geometry.height;
    const double z0 = scenario.geometry.release_height();
    const double d = scenario.geometry.tx_distance;
    const std::size_t n_symbols = bits.size();

    std::vector<std::int64_t> counts(n_symbols, 0);
    std::vector<std::int64_t> sample_steps(n_symbols);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        sample_steps[k] = static_cast<std::int64_t>(
            std::llround((static_cast<double>(k) * symbol_duration + sample_offset) / dt));
    }

    for (std::size_t k = 0; k < n_symbols; ++k) {
        if (!bits[k]) continue;
        const std::int64_t release_step =
            static_cast<std::int64_t>(std::llround(static_cast<double>(k) * symbol_duration / dt));
        // record instants this pulse can still influence
        std::vector<std::int64_t> record_steps;
        std::vector<std::size_t> record_symbols;
        for (std::size_t j = 0; j < n_symbols; ++j) {
            if (sample_steps[j] >= release_step) {
                record_steps.push_back(sample_steps[j] - release_step);
                record_symbols.push_back(j);
            }
        }
        if (record_steps.empty()) continue;

        auto radii_rng = substream(sim.seed, {stream_tag::sequence_radii, k});
        const auto radii = sample_radii(scenario.sizes, n_tx, radii_rng);
        for (std::size_t i = 0; i < n_tx; ++i) {
            const TransportParams tp = scenario.transport_for(radii[i]);
            auto rng = substream(sim.seed, {stream_tag::sequence_particle, k, i});
            std::normal_distribution<double> normal;
            const double sigma_step = std::sqrt(2.0 * tp.diffusion * dt);
            double x = d;
            double z = z0;
            std::int64_t step = 0;
            for (std::size_t j = 0; j < record_steps.size(); ++j) {
                for (; step < record_steps[j]; ++step) {
                    z += -tp.magnetic_drift * dt + sigma_step * normal(rng);
                    z = detail::fold_into_channel(z, h);
                }
                const double elapsed =
                    static_cast<double>(record_steps[j] - (j == 0 ? 0 : record_steps[j - 1])) * dt;
                if (elapsed > 0.0) {
                    x += -scenario.flow_speed * elapsed +
                         std::sqrt(2.0 * tp.diffusion * elapsed) * normal(rng);
                }
                if (scenario.geometry.inside_receiver(x, z)) ++counts[record_symbols[j]];
            }
        }
    }
    return counts;
}

}  // namespace mnpmc
