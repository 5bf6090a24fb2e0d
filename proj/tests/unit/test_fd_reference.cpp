#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mnpmc/fd_reference.hpp"
#include "mnpmc/integrate.hpp"

using namespace mnpmc;

namespace {

// Reference-setup geometry and nominal transport, hard numbers so this file
// stays independent of the physics module it is not checking.
const ChannelGeometry geometry{10e-6, 1e-3, 1e-4, 1e-6};
const TransportParams nominal_transport{4.3085708436251412e-12, 5e-4, 1.3616557734204793e-6};

double cell_mass(const fd::Solution& sol, std::size_t profile) {
    double acc = 0.0;
    for (double p : sol.profiles[profile]) acc += p;
    return acc * sol.cell_width;
}

}  // namespace

TEST_CASE("finite-difference solver conserves mass") {
    const auto sol = fd::crank_nicolson_pdf_z(geometry, nominal_transport, {0.01, 0.5, 2.0, 10.0});
    for (std::size_t k = 0; k < sol.profiles.size(); ++k) {
        CHECK(cell_mass(sol, k) == Catch::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("finite-difference solver matches the Neumann cosine series at zero drift") {
    TransportParams no_drift = nominal_transport;
    no_drift.magnetic_drift = 0.0;
    const std::vector<double> times{0.5, 2.0, 10.0};
    const auto sol = fd::crank_nicolson_pdf_z(geometry, no_drift, times);
    const double h = geometry.height;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double max_err = 0.0;
        for (std::size_t i = 0; i < sol.cell_centers.size(); i += 7) {
            const double ref = fd::neumann_cosine_pdf_z(sol.cell_centers[i], times[k], h,
                                                        geometry.release_height(),
                                                        no_drift.diffusion);
            max_err = std::max(max_err, std::abs(sol.profiles[k][i] - ref));
        }
        // well below the 1e-3/h oracle budget used against the series
        CHECK(max_err < 2e-5 * (1.0 / h));
    }
}

TEST_CASE("finite-difference solver reaches the exponential equilibrium profile") {
    // t = 60 s is far beyond the slowest relaxation time (~2 s)
    const auto sol = fd::crank_nicolson_pdf_z(geometry, nominal_transport, {60.0});
    const double D = nominal_transport.diffusion;
    const double vm = nominal_transport.magnetic_drift;
    const double h = geometry.height;
    const double norm = D * (1.0 - std::exp(-vm * h / D)) / vm;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < sol.cell_centers.size(); i += 13) {
        const double expected = std::exp(-vm * sol.cell_centers[i] / D) / norm;
        max_rel = std::max(max_rel, std::abs(sol.profiles[0][i] - expected) / expected);
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("finite-difference solver is self-convergent") {
    const std::vector<double> times{0.5, 2.0};
    fd::CnOptions coarse;
    coarse.n_cells = 2000;
    coarse.dt_max = 2e-3;
    fd::CnOptions fine;
    fine.n_cells = 4000;
    fine.dt_max = 1e-3;

    const auto a = fd::crank_nicolson_pdf_z(geometry, nominal_transport, times, coarse);
    const auto b = fd::crank_nicolson_pdf_z(geometry, nominal_transport, times, fine);
    const double h = geometry.height;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double max_err = 0.0;
        for (std::size_t i = 0; i < a.cell_centers.size(); ++i) {
            // coarse cell i covers fine cells 2i and 2i+1
            const double fine_val = 0.5 * (b.profiles[k][2 * i] + b.profiles[k][2 * i + 1]);
            max_err = std::max(max_err, std::abs(a.profiles[k][i] - fine_val));
        }
        CHECK(max_err < 2e-4 * (1.0 / h));
    }
}

TEST_CASE("finite-difference solver rejects bad time requests") {
    CHECK_THROWS_AS(fd::crank_nicolson_pdf_z(geometry, nominal_transport, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fd::crank_nicolson_pdf_z(geometry, nominal_transport, {2.0, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fd::crank_nicolson_pdf_z(geometry, nominal_transport, {1e-5}),
                    std::invalid_argument);
}
