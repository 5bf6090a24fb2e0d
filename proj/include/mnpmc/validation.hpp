#pragma once

// Cross-validation harness behind the `validate` experiment: every analytic
// result is checked against an independent route (finite differences, the
// drift-free cosine series, quadrature, long-run particle histograms, or an
// algebraic identity).

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mnpmc/channel_analytic.hpp"
#include "mnpmc/channel_sim.hpp"
#include "mnpmc/fd_reference.hpp"
#include "mnpmc/integrate.hpp"

namespace mnpmc::validation {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string note;
};

namespace detail {

inline constexpr double chi2_99_19dof = 36.19086912927004;

inline CheckResult series_normalization(const ChannelGeometry& geometry,
                                        const TransportParams& transport,
                                        const SeriesControl& series) {
    CheckResult check{"series_normalization", false, 0.0, 1e-6, ""};
    for (double t : {1e-3, 5e-3, 0.05, 0.5, 2.0, 10.0, 100.0}) {
        const double integral = integrate_simpson(
            [&](double z) { return pdf_z(z, t, geometry, transport, series); }, 0.0,
            geometry.height, 20000);
        check.measured = std::max(check.measured, std::abs(integral - 1.0));
    }
    check.pass = check.measured < check.threshold;
    return check;
}

inline CheckResult boundary_flux(const ChannelGeometry& geometry,
                                 const TransportParams& transport,
                                 const SeriesControl& series) {
    CheckResult check{"boundary_flux", false, 0.0, 1e-3, "relative to max pdf_z"};
    const double delta = 1e-4 * geometry.height;
    for (double t : {1e-3, 5e-3, 0.05, 0.5, 2.0, 10.0, 100.0}) {
        double max_p = 0.0;
        for (int i = 0; i <= 200; ++i) {
            max_p = std::max(max_p,
                             pdf_z(geometry.height * i / 200.0, t, geometry, transport, series));
        }
        for (double wall : {0.0, geometry.height}) {
            const double grad =
                (mnpmc::detail::pdf_z_unchecked(wall + delta, t, geometry, transport, series) -
                 mnpmc::detail::pdf_z_unchecked(wall - delta, t, geometry, transport, series)) /
                (2.0 * delta);
            const double residual =
                std::abs(transport.diffusion * grad +
                         transport.magnetic_drift * pdf_z(wall, t, geometry, transport, series));
            check.measured = std::max(check.measured, residual / max_p);
        }
    }
    check.pass = check.measured < check.threshold;
    return check;
}

inline CheckResult zero_drift_oracle(const ChannelGeometry& geometry,
                                     const TransportParams& transport) {
    CheckResult check{"zero_drift_oracle", false, 0.0, 1e-9, "units of 1/h"};
    TransportParams no_drift = transport;
    no_drift.magnetic_drift = 0.0;
    SeriesControl tight;
    tight.n_terms = 2000;
    tight.tail_tolerance = 1e-12;
    for (double t : {0.05, 0.5, 2.0, 10.0}) {
        for (int i = 0; i <= 50; ++i) {
            const double z = geometry.height * i / 50.0;
            const double ref =
                fd::neumann_cosine_pdf_z(z, t, geometry.height, geometry.release_height(),
                                         no_drift.diffusion, 4000);
            const double err = std::abs(pdf_z(z, t, geometry, no_drift, tight) - ref);
            check.measured = std::max(check.measured, err * geometry.height);
        }
    }
    check.pass = check.measured < check.threshold;
    return check;
}

inline CheckResult finite_difference_oracle(const ChannelGeometry& geometry,
                                            const TransportParams& transport,
                                            const SeriesControl& series) {
    CheckResult check{"finite_difference_oracle", false, 0.0, 1e-3, "units of 1/h"};
    const std::vector<double> times{0.5, 2.0, 10.0};
    const auto fd_sol = fd::crank_nicolson_pdf_z(geometry, transport, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t i = 10; i < fd_sol.cell_centers.size(); i += 20) {
            const double err = std::abs(pdf_z(fd_sol.cell_centers[i], times[k], geometry,
                                              transport, series) -
                                        fd_sol.profiles[k][i]);
            check.measured = std::max(check.measured, err * geometry.height);
        }
    }
    check.pass = check.measured < check.threshold;
    return check;
}

inline std::vector<double> final_positions(const ChannelGeometry& geometry,
                                           const TransportParams& transport, double dt,
                                           int n_particles, int n_steps, std::uint64_t seed) {
    std::vector<double> finals(n_particles);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_particles; ++i) {
        auto rng = substream(seed, {stream_tag::validation, static_cast<std::uint64_t>(i)});
        ParticleState p{0.0, geometry.release_height(), 0.0, transport.diffusion,
                        transport.magnetic_drift};
        for (int m = 0; m < n_steps; ++m) {
            p = step_particle(p, dt, 0.0, geometry.height, rng);
        }
        finals[i] = p.z;
    }
    return finals;
}

inline CheckResult equilibrium_histogram(const ChannelGeometry& geometry,
                                         const TransportParams& transport, bool drifted,
                                         std::uint64_t seed) {
    CheckResult check{drifted ? "equilibrium_histogram_drifted" : "equilibrium_histogram_uniform",
                      false, 0.0, chi2_99_19dof, "chi^2, 19 dof, alpha = 0.01"};
    TransportParams tp = transport;
    if (!drifted) tp.magnetic_drift = 0.0;

    const int n_particles = 2000;
    const int n_steps = 30000;  // 60 s at 2 ms; slowest mode relaxes in ~2 s
    const auto finals = final_positions(geometry, tp, 2e-3, n_particles, n_steps, seed);

    const int n_bins = 20;
    const double h = geometry.height;
    std::vector<double> observed(n_bins, 0.0), expected(n_bins);
    for (double z : finals) {
        observed[std::min(n_bins - 1, static_cast<int>(z / h * n_bins))] += 1.0;
    }
    for (int b = 0; b < n_bins; ++b) {
        expected[b] = n_particles *
                      integrate_simpson([&](double z) { return equilibrium_pdf_z(z, geometry, tp); },
                                        b * h / n_bins, (b + 1) * h / n_bins, 64);
    }
    double chi2 = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        const double diff = observed[b] - expected[b];
        chi2 += diff * diff / expected[b];
    }
    check.measured = chi2;
    check.pass = chi2 < check.threshold;
    return check;
}

inline CheckResult einstein_relation(const Scenario& scenario, std::uint64_t seed) {
    CheckResult check{"einstein_relation", false, 0.0, 1e-12, "relative, 1e4 draws"};
    auto rng = substream(seed, {stream_tag::validation, 101});
    std::uniform_real_distribution<double> ur(5e-9, 500e-9);
    std::uniform_real_distribution<double> ue(1e-4, 1e-2);
    std::uniform_real_distribution<double> ut(250.0, 370.0);
    for (int i = 0; i < 10000; ++i) {
        const ParticleModel p{ur(rng), ur(rng) / 20.0, scenario.saturation_magnetization};
        const FluidEnvironment env{ue(rng), ut(rng)};
        const double zeta = 6.0 * pi * env.viscosity * p.hydrodynamic_radius();
        const double rel =
            std::abs(diffusion_coefficient(p, env) * zeta - k_boltzmann * env.temperature) /
            (k_boltzmann * env.temperature);
        check.measured = std::max(check.measured, rel);
    }
    check.pass = check.measured < check.threshold;
    return check;
}

inline CheckResult stokes_consistency(const Scenario& scenario, std::uint64_t seed) {
    CheckResult check{"stokes_drift_consistency", false, 0.0, 1e-12, "relative, 1e4 draws"};
    auto rng = substream(seed, {stream_tag::validation, 102});
    std::uniform_real_distribution<double> ur(5e-9, 500e-9);
    std::uniform_real_distribution<double> ue(1e-4, 1e-2);
    std::uniform_real_distribution<double> ug(0.1, 50.0);
    for (int i = 0; i < 10000; ++i) {
        const ParticleModel p{ur(rng), ur(rng) / 20.0, scenario.saturation_magnetization};
        const FluidEnvironment env{ue(rng), 300.0};
        const MagnetField field{ug(rng), 0.0};
        const double zeta = 6.0 * pi * env.viscosity * p.hydrodynamic_radius();
        const double force = magnetic_force(p, field);
        if (force == 0.0) continue;
        const double rel = std::abs(drift_velocity(p, field, env) * zeta - force) / force;
        check.measured = std::max(check.measured, rel);
    }
    check.pass = check.measured < check.threshold;
    return check;
}

inline CheckResult lognormal_moments(const Scenario& scenario, std::uint64_t seed) {
    CheckResult check{"lognormal_moments", false, 0.0, 2e-3, "relative, 1e6 samples"};
    SizeDistribution dist = scenario.sizes;
    if (dist.sd_radius == 0.0) dist.sd_radius = 0.2 * dist.mean_radius;
    auto rng = substream(seed, {stream_tag::validation, 103});
    const auto radii = sample_radii(dist, 1'000'000, rng);
    double mean = 0.0;
    for (double r : radii) mean += r;
    mean /= static_cast<double>(radii.size());
    double ss = 0.0;
    for (double r : radii) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / static_cast<double>(radii.size() - 1));
    check.measured = std::max(std::abs(mean - dist.mean_radius) / dist.mean_radius,
                              std::abs(sd - dist.sd_radius) / dist.sd_radius);
    check.pass = check.measured < check.threshold;
    return check;
}

inline CheckResult series_truncation(const ChannelGeometry& geometry,
                                     const TransportParams& transport,
                                     const SeriesControl& series) {
    CheckResult check{"series_truncation", true, 0.0, 0.0, "converged at all probe times"};
    for (double t : {2.5e-3, 5e-3, 0.01, 0.02, 0.05, 0.1, 1.0}) {
        try {
            (void)pdf_z(0.5 * geometry.height, t, geometry, transport, series);
            (void)prob_obs_z(t, geometry, transport, series);
        } catch (const SeriesTruncationError& e) {
            check.pass = false;
            check.measured = e.tail_bound;
            check.threshold = e.tolerance;
            check.note = "not converged at t = " + std::to_string(t) + " s with n_terms = " +
                         std::to_string(series.n_terms);
            return check;
        }
    }
    return check;
}

}  // namespace detail

/// Runs the full cross-validation suite for one scenario.
inline std::vector<CheckResult> run_invariant_suite(const Scenario& scenario,
                                                    const SeriesControl& series,
                                                    std::uint64_t seed) {
    scenario.validate();
    series.validate();
    const TransportParams transport = scenario.nominal_transport();

    std::vector<CheckResult> results;
    results.push_back(detail::series_truncation(scenario.geometry, transport, series));
    const bool converged = results.back().pass;
    if (converged) {
        results.push_back(detail::series_normalization(scenario.geometry, transport, series));
        results.push_back(detail::boundary_flux(scenario.geometry, transport, series));
        results.push_back(detail::zero_drift_oracle(scenario.geometry, transport));
        results.push_back(detail::finite_difference_oracle(scenario.geometry, transport, series));
    }
    results.push_back(detail::equilibrium_histogram(scenario.geometry, transport, false, seed));
    results.push_back(detail::equilibrium_histogram(scenario.geometry, transport, true, seed));
    results.push_back(detail::einstein_relation(scenario, seed));
    results.push_back(detail::stokes_consistency(scenario, seed));
    results.push_back(detail::lognormal_moments(scenario, seed));
    return results;
}

}  // namespace mnpmc::validation
