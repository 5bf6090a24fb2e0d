#pragma once

// Independent reference solutions for the bounded drift-diffusion problem.
// Everything here is deliberately kept free of the eigenfunction-series code
// so it can serve as a cross-validation oracle for it.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mnpmc/channel.hpp"
#include "mnpmc/constants.hpp"

namespace mnpmc::fd {

/// Grid solution of the vertical PDE at a set of requested times.
struct Solution {
    std::vector<double> cell_centers;          ///< z_i, m
    std::vector<std::vector<double>> profiles; ///< profiles[k][i] = p(z_i; t_k)
    double cell_width = 0.0;
};

/// Crank-Nicolson options. Defaults resolve the reference setup to a few
/// times 1e-5 relative accuracy in the profile.
struct CnOptions {
    int n_cells = 4000;
    double dt_initial = 1e-5;  ///< s, first step after the ramp start
    double dt_max = 1e-3;      ///< s, step cap
    double ramp_factor = 1.08; ///< geometric step growth
    double t_init = 1e-4;      ///< s, start time of the projected initial profile
    int rannacher_steps = 4;   ///< damped (implicit Euler) startup steps
};

namespace detail {

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Cell-averaged projection of the short-time profile: a Gaussian released at
// z0 after drifting for t_init, folded at both walls. Cell masses come from
// CDF differences, so total mass is exact and the centroid is unbiased even
// for a release on the wall itself.
inline std::vector<double> project_initial_profile(double z0, double t_init,
                                                   const TransportParams& transport, double h,
                                                   int n_cells) {
    const double mean = z0 - transport.magnetic_drift * t_init;
    const double sd = std::sqrt(2.0 * transport.diffusion * t_init);
    const double dz = h / n_cells;

    auto folded_cdf = [&](double z) {
        // images of the density at 2kh +/- (z' - mean)
        double acc = 0.0;
        for (int k = -3; k <= 3; ++k) {
            const double shift = 2.0 * k * h;
            acc += std_normal_cdf((z - shift - mean) / sd);
            acc -= std_normal_cdf((-z - shift - mean) / sd); // reflected branch
        }
        return acc;
    };

    std::vector<double> p(n_cells, 0.0);
    double below = folded_cdf(0.0);
    for (int i = 0; i < n_cells; ++i) {
        const double above = folded_cdf((i + 1) * dz);
        p[i] = (above - below) / dz;
        below = above;
    }
    return p;
}

// Solves (I - c L) x = rhs for the conservative flux operator L with
// zero-flux walls, using the Thomas algorithm. L is expressed through its
// tridiagonal coefficients built once per step size.
struct TridiagonalSystem {
    std::vector<double> lower, diag, upper;

    // work arrays
    mutable std::vector<double> cp, dp;

    void solve(std::vector<double>& x, const std::vector<double>& rhs) const {
        const std::size_t n = diag.size();
        cp.resize(n);
        dp.resize(n);
        cp[0] = upper[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = diag[i] - lower[i] * cp[i - 1];
            cp[i] = upper[i] / m;
            dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
        }
        x[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
    }
};

// Applies the explicit operator y = (I + c L) p.
// Flux through face i+1/2: J = -v_m (p_i + p_{i+1})/2 - D (p_{i+1} - p_i)/dz,
// zero at both walls; dp_i/dt = -(J_{i+1/2} - J_{i-1/2})/dz.
inline void apply_operator(const std::vector<double>& p, std::vector<double>& y, double c,
                           double D, double vm, double dz) {
    const std::size_t n = p.size();
    const double a = D / (dz * dz);
    const double b = vm / (2.0 * dz);
    for (std::size_t i = 0; i < n; ++i) {
        double lp = 0.0; // contribution of the operator row
        if (i > 0) lp += (a - b) * p[i - 1];
        if (i + 1 < n) lp += (a + b) * p[i + 1];
        double diag = 0.0;
        if (i > 0) diag -= a + b;
        if (i + 1 < n) diag -= a - b;
        lp += diag * p[i];
        y[i] = p[i] + c * lp;
    }
}

inline TridiagonalSystem implicit_system(std::size_t n, double c, double D, double vm,
                                         double dz) {
    const double a = D / (dz * dz);
    const double b = vm / (2.0 * dz);
    TridiagonalSystem sys;
    sys.lower.assign(n, 0.0);
    sys.diag.assign(n, 0.0);
    sys.upper.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0.0;
        if (i > 0) {
            sys.lower[i] = -c * (a - b);
            diag -= a + b;
        }
        if (i + 1 < n) {
            sys.upper[i] = -c * (a + b);
            diag -= a - b;
        }
        sys.diag[i] = 1.0 - c * diag;
    }
    return sys;
}

}  // namespace detail

/// Crank-Nicolson solution of the wall-bounded drift-diffusion equation
///   dp/dt = v_m dp/dz + D d2p/dz2,   zero-flux walls at z = 0 and z = h,
///   p(z; 0) = delta(z - z0),
/// evaluated at the requested times (ascending, all > options.t_init).
/// The delta release is carried analytically to t_init as a wall-folded
/// Gaussian and projected onto the grid by exact cell masses.
inline Solution crank_nicolson_pdf_z(const ChannelGeometry& geometry,
                                     const TransportParams& transport,
                                     const std::vector<double>& times,
                                     const CnOptions& options = {}) {
    geometry.validate();
    transport.validate();
    if (times.empty()) throw std::invalid_argument("fd.times must be nonempty");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("fd.times must be ascending");
    if (times.front() <= options.t_init)
        throw std::invalid_argument("fd.times must exceed the start time of the solver");

    const double h = geometry.height;
    const double dz = h / options.n_cells;
    const double D = transport.diffusion;
    const double vm = transport.magnetic_drift;

    Solution out;
    out.cell_width = dz;
    out.cell_centers.resize(options.n_cells);
    for (int i = 0; i < options.n_cells; ++i) out.cell_centers[i] = (i + 0.5) * dz;

    std::vector<double> p = detail::project_initial_profile(geometry.release_height(),
                                                            options.t_init, transport, h,
                                                            options.n_cells);
    std::vector<double> rhs(p.size());

    double t = options.t_init;
    double dt_next = options.dt_initial;
    int startup = options.rannacher_steps;

    // Cache of the implicit system for the current step size.
    double cached_dt = -1.0;
    bool cached_damped = false;
    detail::TridiagonalSystem sys;

    for (const double target : times) {
        while (t < target * (1.0 - 1e-12)) {
            double dt = std::min(dt_next, target - t);
            const bool damped = startup > 0;
            if (dt != cached_dt || damped != cached_damped) {
                // implicit Euler during startup, trapezoidal afterwards
                sys = detail::implicit_system(p.size(), damped ? dt : 0.5 * dt, D, vm, dz);
                cached_dt = dt;
                cached_damped = damped;
            }
            if (damped) {
                rhs = p;
                --startup;
            } else {
                detail::apply_operator(p, rhs, 0.5 * dt, D, vm, dz);
            }
            sys.solve(p, rhs);
            t += dt;
            dt_next = std::min(dt_next * options.ramp_factor, options.dt_max);
        }
        out.profiles.push_back(p);
    }
    return out;
}

/// Classical reflected (Neumann) cosine-series solution of the drift-free
/// diffusion equation on [0, h]: the v_m = 0 oracle for the general series.
inline double neumann_cosine_pdf_z(double z, double t, double h, double z0, double diffusion,
                                   int n_terms = 2000) {
    if (!(t > 0.0)) throw std::invalid_argument("neumann_cosine_pdf_z requires t > 0");
    double acc = 1.0 / h;
    for (int n = 1; n <= n_terms; ++n) {
        const double sn = n * pi / h;
        const double damp = std::exp(-diffusion * sn * sn * t);
        acc += 2.0 / h * damp * std::cos(sn * z) * std::cos(sn * z0);
        if (damp < 1e-18 && n > 4) break;
    }
    return acc;
}

}  // namespace mnpmc::fd
