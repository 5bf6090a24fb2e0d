// Acceptance suite: runs every release criterion at full scale and prints
// one PASS/FAIL line per criterion. Exit code = number of failed criteria.
//
// Expected runtime is tens of minutes at full scale, dominated by the
// particle simulations of criteria 1 and 7.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mnpmc/channel_analytic.hpp"
#include "mnpmc/channel_sim.hpp"
#include "mnpmc/experiment.hpp"
#include "mnpmc/fd_reference.hpp"
#include "mnpmc/integrate.hpp"
#include "mnpmc/link.hpp"
#include "mnpmc/validation.hpp"

using namespace mnpmc;

namespace {

struct Criterion {
    int number;
    bool pass;
    std::string summary;
};

std::vector<Criterion> results;

void report(int number, bool pass, const std::string& summary) {
    results.push_back({number, pass, summary});
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", number, summary.c_str());
    std::fflush(stdout);
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

Scenario table_scenario() {
    ExperimentConfig config;  // defaults are the reference table
    return config.scenario();
}

constexpr std::uint64_t kSeed = 20250810;

// ---------------------------------------------------------------- criterion 1
// Analytic-simulation agreement: N_tx=1000, dt=2 ms, 1e4 realizations,
// gradients {5, 20} T/m, 20 sample times in [1.8, 2.2] s, analytic within
// 3 standard errors of the simulated mean at >= 19/20 times per gradient.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (double gradient : {5.0, 20.0}) {
        Scenario scenario = table_scenario();
        scenario.field.gradient_magnitude = gradient;
        SimConfig sim{2e-3, 10000, kSeed, 6};  // samples every 12 ms
        const auto series = simulate_impulse(scenario, 1000, sim, 2.2);

        std::vector<double> times;
        std::vector<std::size_t> index;
        for (std::size_t j = 0; j < series.sample_times.size(); ++j) {
            const double t = series.sample_times[j];
            if (t >= 1.884 - 1e-9 && t <= 2.112 + 1e-9) {  // 20 grid times in [1.8, 2.2]
                times.push_back(t);
                index.push_back(j);
            }
        }
        const auto analytic = impulse_response(times, scenario, 1000, sim.seed);

        int hits = 0;
        double worst = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double diff =
                std::abs(analytic.counts[k] - series.mean_count[index[k]]);
            const double band = 3.0 * series.stderr_count[index[k]];
            if (diff <= band) ++hits;
            if (band > 0.0) worst = std::max(worst, diff / band);
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, " [%g T/m: %d/%zu within 3 SE, worst %.2fx band]",
                      gradient, hits, times.size(), worst);
        detail += buf;
        pass = pass && times.size() == 20 && hits >= 19;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.0f s)", elapsed_s(t0));
    report(1, pass, "impulse response matches simulation" + detail + buf);
}

// ---------------------------------------------------------------- criterion 2
// Nominal impulse response support (> 1% of peak) has width in
// [0.15, 0.25] s centered within [1.9, 2.1] s.
void criterion_2() {
    Scenario scenario = table_scenario();
    scenario.sizes.sd_radius = 0.0;
    const TransportParams transport = scenario.nominal_transport();
    std::vector<double> times, counts;
    for (double t = 1.5; t <= 2.5 + 1e-12; t += 0.002) {
        times.push_back(t);
        counts.push_back(1000.0 * prob_obs(t, scenario.geometry, transport));
    }
    const double peak = *std::max_element(counts.begin(), counts.end());
    double t_lo = times.back(), t_hi = times.front();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (counts[i] > 0.01 * peak) {
            t_lo = std::min(t_lo, times[i]);
            t_hi = std::max(t_hi, times[i]);
        }
    }
    const double width = t_hi - t_lo;
    const double center = 0.5 * (t_lo + t_hi);
    const bool pass = width >= 0.15 && width <= 0.25 && center >= 1.9 && center <= 2.1;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "observation window width %.4f s in [0.15, 0.25], center %.4f s in [1.9, 2.1]",
                  width, center);
    report(2, pass, buf);
}

// ---------------------------------------------------------------- criterion 3
// Magnetization saturation and curve ordering.
void criterion_3() {
    const Scenario scenario = table_scenario();
    const double ms = scenario.saturation_magnetization;
    const double ratio = magnetization(1e-3, scenario.particle(50e-9), scenario.fluid) / ms;
    const double m40 = magnetization(0.2e-3, scenario.particle(40e-9), scenario.fluid);
    const double m50 = magnetization(0.2e-3, scenario.particle(50e-9), scenario.fluid);
    const double m60 = magnetization(0.2e-3, scenario.particle(60e-9), scenario.fluid);
    const bool pass = ratio >= 0.98 && m60 > m50 && m50 > m40;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "M(1 mT)/M_s = %.4f >= 0.98; ordering at 0.2 mT: %.0f > %.0f > %.0f A/m",
                  ratio, m60, m50, m40);
    report(3, pass, buf);
}

// ---------------------------------------------------------------- criterion 4
// Equilibrium limits of the z observation probability and monotonicity.
void criterion_4() {
    const Scenario scenario = table_scenario();
    const ChannelGeometry& geometry = scenario.geometry;
    TransportParams tp = scenario.nominal_transport();

    tp.magnetic_drift = 0.0;
    const double low = equilibrium_prob_obs_z(geometry, tp);
    const double low_target = geometry.receiver_height / geometry.height;
    const bool low_ok = std::abs(low - low_target) <= 1e-9;

    // deep in the drift-dominated regime (v_m h / D > 50)
    tp.magnetic_drift = 500.0 * tp.diffusion / geometry.height;
    const double high = equilibrium_prob_obs_z(geometry, tp);
    const bool high_ok = high >= 1.0 - 1e-9;

    bool monotone = true;
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        // v_m h / D swept logarithmically over 1e-3 .. 1e3
        tp.magnetic_drift = 1e-3 * std::pow(1e6, i / 100.0) * tp.diffusion / geometry.height;
        const double val = equilibrium_prob_obs_z(geometry, tp);
        if (val < prev) monotone = false;
        prev = val;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "equilibrium limits: %.10f -> c_z/h (err %.1e), %.12f at v_m h/D = 500, "
                  "monotone over 100-point sweep: %s",
                  low, std::abs(low - low_target), high, monotone ? "yes" : "no");
    report(4, low_ok && high_ok && monotone, buf);
}

// ---------------------------------------------------------------- criterion 5
// Series solution vs the independent Crank-Nicolson reference.
void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario scenario = table_scenario();
    const TransportParams transport = scenario.nominal_transport();
    const std::vector<double> times{0.5, 2.0, 10.0};
    const auto fd_sol = fd::crank_nicolson_pdf_z(scenario.geometry, transport, times);

    const double budget = 1e-3 * (1.0 / scenario.geometry.height);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t i = 10; i < fd_sol.cell_centers.size(); i += 20) {  // 200 z-points
            const double err = std::abs(pdf_z(fd_sol.cell_centers[i], times[k],
                                              scenario.geometry, transport) -
                                        fd_sol.profiles[k][i]);
            worst = std::max(worst, err);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "series vs finite differences at t = {0.5, 2, 10} s: Linf %.3e < %.3e (%.0f s)",
                  worst, budget, elapsed_s(t0));
    report(5, worst < budget, buf);
}

// ---------------------------------------------------------------- criterion 6
// Normalization and boundary flux over t in [1 ms, 100 s].
void criterion_6() {
    const Scenario scenario = table_scenario();
    const ChannelGeometry& geometry = scenario.geometry;
    const TransportParams transport = scenario.nominal_transport();
    const SeriesControl series;  // n_terms = 500 >= 200

    double worst_norm = 0.0, worst_flux = 0.0;
    const double delta = 1e-4 * geometry.height;
    for (double t : {1e-3, 3e-3, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) {
        const double integral = integrate_simpson(
            [&](double z) { return pdf_z(z, t, geometry, transport, series); }, 0.0,
            geometry.height, 20000);
        worst_norm = std::max(worst_norm, std::abs(integral - 1.0));

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
            worst_flux = std::max(worst_flux, residual / max_p);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "normalization |int - 1| %.2e < 1e-6; boundary flux residual %.2e < 1e-3",
                  worst_norm, worst_flux);
    report(6, worst_norm < 1e-6 && worst_flux < 1e-3, buf);
}

// ---------------------------------------------------------------- criterion 7
// SER consistency at dt = 20 ms, K = 10, xi = 1: Monte Carlo vs the no-ISI
// closed form wherever it predicts SER >= 5e-5; magnet ordering at every
// N_tx; material flow sensitivity. A 1e4-sequence smoke tier must finish
// within 2 minutes.
void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig config;
    const SeriesControl series;
    LinkConfig link{2.0, 2.0, 1, 10, 10};

    // population mean observation probability, magnet on and off
    auto pbar_for = [&](double gradient, double flow) {
        Scenario s = table_scenario();
        s.field.gradient_magnitude = gradient;
        s.flow_speed = flow;
        return mnpmc::detail::population_mean_prob(s, link.sample_offset, series, kSeed);
    };
    const double pbar_on = pbar_for(5.0, 5e-4);
    const double pbar_off = pbar_for(0.0, 5e-4);

    // smoke tier first: 1e4 sequences at N_tx = 10, both magnet states
    const auto smoke_start = std::chrono::steady_clock::now();
    for (double gradient : {5.0, 0.0}) {
        Scenario s = table_scenario();
        s.field.gradient_magnitude = gradient;
        link.n_tx = 10;
        SimConfig sim{20e-3, 1, stream_seed(kSeed, {7, 1}), 1};
        (void)ser_monte_carlo(link, s, sim, 10000);
    }
    const double smoke_s = elapsed_s(smoke_start);
    const bool smoke_ok = smoke_s < 120.0;
    std::fprintf(stderr, "  smoke tier: %.0f s\n", smoke_s);

    // full tier: 1e5 sequences wherever the closed form predicts >= 5e-5
    bool ci_ok = true;
    std::string detail;
    for (double gradient : {5.0, 0.0}) {
        const double pbar = gradient > 0.0 ? pbar_on : pbar_off;
        for (std::int64_t n_tx : {10, 100, 1000}) {
            const double analytic = ser_no_isi(static_cast<double>(n_tx) * pbar);
            if (analytic < 5e-5) continue;
            Scenario s = table_scenario();
            s.field.gradient_magnitude = gradient;
            link.n_tx = n_tx;
            SimConfig sim{20e-3, 1,
                          stream_seed(kSeed, {7, 2, static_cast<std::uint64_t>(n_tx),
                                              gradient > 0.0 ? 1ull : 0ull}),
                          1};
            const auto est = ser_monte_carlo(link, s, sim, 100000);
            const double dev = std::abs(est.ser - analytic) / est.standard_error();
            const bool row_ok = dev <= 3.0;
            ci_ok = ci_ok && row_ok;
            char buf[128];
            std::snprintf(buf, sizeof buf, " [%s N=%lld: mc %.4g vs %.4g, %.1f sigma%s]",
                          gradient > 0.0 ? "on" : "off", static_cast<long long>(n_tx), est.ser,
                          analytic, dev, row_ok ? "" : " MISS");
            detail += buf;
            std::fprintf(stderr, "  %s\n", buf);
        }
    }

    // magnet ordering at every N_tx (closed-form columns)
    bool ordering = true;
    for (std::int64_t n_tx : {10, 100, 1000}) {
        ordering = ordering && ser_no_isi(static_cast<double>(n_tx) * pbar_on) <
                                   ser_no_isi(static_cast<double>(n_tx) * pbar_off);
    }

    // flow sensitivity: +-20% flow at fixed sampling schedule, N_tx = 10
    const double base = ser_no_isi(10.0 * pbar_on);
    const double up = ser_no_isi(10.0 * pbar_for(5.0, 1.2 * 5e-4));
    const double down = ser_no_isi(10.0 * pbar_for(5.0, 0.8 * 5e-4));
    const bool flow_ok = std::abs(up - base) > 0.1 && std::abs(down - base) > 0.1;

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  " ordering on<off: %s; flow +-20%%: |%.3f, %.3f - %.3f| > 0.1: %s; "
                  "smoke tier %.0f s < 120 s (%.0f s total)",
                  ordering ? "yes" : "no", up, down, base, flow_ok ? "yes" : "no", smoke_s,
                  elapsed_s(t0));
    report(7, ci_ok && ordering && flow_ok && smoke_ok, "SER:" + detail + buf);
}

// ---------------------------------------------------------------- criterion 8
// Physics identities and log-normal moment recovery.
void criterion_8() {
    const Scenario scenario = table_scenario();
    const auto einstein = validation::detail::einstein_relation(scenario, kSeed);
    const auto stokes = validation::detail::stokes_consistency(scenario, kSeed);
    auto moments = validation::detail::lognormal_moments(scenario, kSeed);
    moments.threshold = 2e-3;  // 0.2% at 1e6 samples
    moments.pass = moments.measured < moments.threshold;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "Einstein %.1e and Stokes %.1e below 1e-12 relative (1e4 draws); "
                  "log-normal moments within %.4f%% of targets (1e6 samples)",
                  einstein.measured, stokes.measured, 100.0 * moments.measured);
    report(8, einstein.pass && stokes.pass && moments.pass, buf);
}

}  // namespace

int main() {
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_8();
    criterion_7();
    criterion_1();

    std::sort(results.begin(), results.end(),
              [](const Criterion& a, const Criterion& b) { return a.number < b.number; });
    int failed = 0;
    std::puts("\n--- summary ---");
    for (const auto& c : results) {
        std::printf("%s criterion %d\n", c.pass ? "PASS" : "FAIL", c.number);
        if (!c.pass) ++failed;
    }
    std::printf("acceptance: %zu criteria, %d failed\n", results.size(), failed);
    return failed;
}
