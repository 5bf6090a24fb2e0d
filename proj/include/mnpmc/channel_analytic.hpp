#pragma once

// Closed-form position statistics for the bounded 2-D channel: free-space
// horizontal PDF under flow, vertical drift-diffusion PDF between reflective
// walls (equilibrium + eigenfunction transient), receiver observation
// probabilities, and the size-averaged impulse response.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mnpmc/channel.hpp"
#include "mnpmc/constants.hpp"

namespace mnpmc {

/// Thrown when the eigenfunction series cannot reach the requested tail
/// tolerance within SeriesControl::n_terms.
class SeriesTruncationError : public std::runtime_error {
  public:
    SeriesTruncationError(double t, double bound, double tolerance)
        : std::runtime_error("series not converged at t = " + std::to_string(t) +
                             ": tail bound " + std::to_string(bound) + " exceeds tolerance " +
                             std::to_string(tolerance)),
          time(t), tail_bound(bound), tolerance(tolerance) {}

    double time;
    double tail_bound;
    double tolerance;
};

namespace detail {

// Below this value of D t / h^2 the eigenfunction series converges too
// slowly and the walls are still effectively invisible from the release
// point scale, so the wall-folded free-space Gaussian is used instead.
inline constexpr double images_switch = 1e-4;

// The v_m -> 0 limits of the equilibrium expressions take over below this
// value of v_m h / D.
inline constexpr double drift_free_eps = 1e-8;

inline double gaussian(double x, double variance) {
    return std::exp(-x * x / (2.0 * variance)) / std::sqrt(2.0 * pi * variance);
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Orthonormal transient eigenfunction Z_n(z), s_n = n pi / h.
inline double eigenfunction_z(double z, double sn, double u, double norm) {
    return norm * (sn * std::cos(sn * z) - u * std::sin(sn * z));
}

// Vertical PDF via wall images of the drifted free-space Gaussian;
// accurate exactly where the series branch is not (D t / h^2 small).
inline double pdf_z_images(double z, double t, double h, double z0,
                           const TransportParams& transport) {
    const double mean = z0 - transport.magnetic_drift * t;
    const double variance = 2.0 * transport.diffusion * t;
    double acc = 0.0;
    for (int k = -2; k <= 2; ++k) {
        const double shift = 2.0 * k * h;
        acc += gaussian(z - shift - mean, variance);
        acc += gaussian(z - shift + mean, variance);
    }
    return acc;
}

// Integral of pdf_z_images over [0, c_z].
inline double prob_obs_z_images(double t, double h, double z0, double c_z,
                                const TransportParams& transport) {
    const double mean = z0 - transport.magnetic_drift * t;
    const double sd = std::sqrt(2.0 * transport.diffusion * t);
    double acc = 0.0;
    for (int k = -2; k <= 2; ++k) {
        const double shift = 2.0 * k * h;
        acc += std_normal_cdf((c_z - shift - mean) / sd) - std_normal_cdf((-shift - mean) / sd);
        acc += std_normal_cdf((c_z - shift + mean) / sd) - std_normal_cdf((-shift + mean) / sd);
    }
    return acc;
}

// Geometric bound on the series tail after the term with index n:
// sum_{m > n} e^{-alpha m^2} <= e^{-alpha (n+1)^2} / (1 - e^{-alpha (2n+3)}).
inline double tail_envelope(double alpha, int n) {
    const double first = std::exp(-alpha * double(n + 1) * double(n + 1));
    const double ratio = std::exp(-alpha * double(2 * n + 3));
    return first / (1.0 - ratio);
}

// Transient series sum_{n} e^{-D (s_n^2 + u^2) t} f_n(z...) with an
// analytic tail bound; kernel(sn, norm) supplies the n-th coefficient.
// tol is an absolute bound on the neglected tail of prefactor * sum.
template <typename Kernel>
double transient_sum(double t, double h, double u, double diffusion, double prefactor,
                     const SeriesControl& series, double tol, Kernel&& kernel) {
    const double alpha = diffusion * pi * pi / (h * h) * t;
    const double drift_damp = std::exp(-diffusion * u * u * t);
    double acc = 0.0;
    for (int n = 1; n <= series.n_terms; ++n) {
        const double sn = n * pi / h;
        const double norm = std::sqrt(2.0 / (h * (sn * sn + u * u)));
        acc += std::exp(-alpha * double(n) * double(n)) * kernel(sn, norm);
        const double bound =
            prefactor * drift_damp * (2.0 / h) * tail_envelope(alpha, n);
        if (bound < tol) {
            return drift_damp * acc;
        }
    }
    const double bound =
        prefactor * drift_damp * (2.0 / h) * tail_envelope(alpha, series.n_terms);
    throw SeriesTruncationError(t, bound, tol);
}

// Series evaluation of the vertical PDF without domain checks on z; the
// expression itself extends smoothly outside [0, h], which the boundary-flux
// diagnostics rely on.
inline double pdf_z_unchecked(double z, double t, const ChannelGeometry& geometry,
                              const TransportParams& transport, const SeriesControl& series);

inline double equilibrium_pdf_z_unchecked(double z, const ChannelGeometry& geometry,
                                          const TransportParams& transport) {
    const double h = geometry.height;
    const double a = transport.magnetic_drift * h / transport.diffusion;
    if (a < drift_free_eps) return 1.0 / h;
    const double norm = transport.diffusion * (-std::expm1(-a)) / transport.magnetic_drift;
    return std::exp(-transport.magnetic_drift * z / transport.diffusion) / norm;
}

inline double pdf_z_unchecked(double z, double t, const ChannelGeometry& geometry,
                              const TransportParams& transport, const SeriesControl& series) {
    const double h = geometry.height;
    const double z0 = geometry.release_height();
    if (transport.diffusion * t / (h * h) < images_switch) {
        return pdf_z_images(z, t, h, z0, transport);
    }
    const double u = transport.drift_rate_u();
    const double prefactor = std::exp(-u * (z - z0));
    const double tol = series.tail_tolerance / h;
    const double transient = transient_sum(
        t, h, u, transport.diffusion, prefactor, series, tol,
        [&](double sn, double norm) {
            return eigenfunction_z(z, sn, u, norm) * eigenfunction_z(z0, sn, u, norm);
        });
    return equilibrium_pdf_z_unchecked(z, geometry, transport) + prefactor * transient;
}

}  // namespace detail

/// Horizontal position density p_x(x; t): free-space Gaussian drifting
/// downstream, mean d - v_f t, variance 2 D t.
inline double pdf_x(double x, double t, const ChannelGeometry& geometry,
                    const TransportParams& transport) {
    if (!(t > 0.0)) throw std::domain_error("pdf_x requires t > 0");
    const double mean = geometry.tx_distance - transport.flow_speed * t;
    return detail::gaussian(x - mean, 2.0 * transport.diffusion * t);
}

/// Steady-state vertical density: exponential wall accumulation profile,
/// or the uniform 1/h limit when the drift vanishes.
inline double equilibrium_pdf_z(double z, const ChannelGeometry& geometry,
                                const TransportParams& transport) {
    if (z < 0.0 || z > geometry.height)
        throw std::domain_error("equilibrium_pdf_z requires 0 <= z <= height");
    return detail::equilibrium_pdf_z_unchecked(z, geometry, transport);
}

/// Time-variant vertical density: equilibrium profile plus the decaying
/// eigenfunction transient. Falls back to the wall-folded free-space
/// Gaussian for very small D t / h^2 where the series converges slowly.
inline double pdf_z(double z, double t, const ChannelGeometry& geometry,
                    const TransportParams& transport, const SeriesControl& series = {}) {
    if (!(t > 0.0)) throw std::domain_error("pdf_z requires t > 0");
    return detail::pdf_z_unchecked(z, t, geometry, transport, series);
}

/// Probability that the particle x-coordinate lies over the receiver.
inline double prob_obs_x(double t, const ChannelGeometry& geometry,
                         const TransportParams& transport) {
    if (!(t > 0.0)) throw std::domain_error("prob_obs_x requires t > 0");
    const double mean = geometry.tx_distance - transport.flow_speed * t;
    const double spread = std::sqrt(4.0 * transport.diffusion * t);
    const double half_width = 0.5 * geometry.receiver_width;
    return 0.5 * (std::erf((mean + half_width) / spread) - std::erf((mean - half_width) / spread));
}

/// Steady-state probability that the z-coordinate lies below the receiver
/// height: (1 - e^{-v_m c_z / D}) / (1 - e^{-v_m h / D}); limits c_z/h for
/// v_m -> 0 and 1 for v_m -> infinity.
inline double equilibrium_prob_obs_z(const ChannelGeometry& geometry,
                                     const TransportParams& transport) {
    const double a = transport.magnetic_drift * geometry.height / transport.diffusion;
    if (a < detail::drift_free_eps) return geometry.receiver_height / geometry.height;
    const double num =
        -std::expm1(-transport.magnetic_drift * geometry.receiver_height / transport.diffusion);
    return num / (-std::expm1(-a));
}

/// Probability that the z-coordinate lies within [0, c_z] at time t. The
/// converged series can overshoot [0, 1] by at most the tail tolerance, so
/// the result is clamped.
inline double prob_obs_z(double t, const ChannelGeometry& geometry,
                         const TransportParams& transport, const SeriesControl& series = {}) {
    if (!(t > 0.0)) throw std::domain_error("prob_obs_z requires t > 0");
    const double h = geometry.height;
    const double z0 = geometry.release_height();
    const double c_z = geometry.receiver_height;

    double value;
    if (transport.diffusion * t / (h * h) < detail::images_switch) {
        value = detail::prob_obs_z_images(t, h, z0, c_z, transport);
    } else {
        const double u = transport.drift_rate_u();
        const double prefactor = std::exp(-u * (c_z - z0));
        const double transient = detail::transient_sum(
            t, h, u, transport.diffusion, prefactor, series, series.tail_tolerance,
            [&](double sn, double norm) {
                return norm * std::sin(sn * c_z) * detail::eigenfunction_z(z0, sn, u, norm);
            });
        value = equilibrium_prob_obs_z(geometry, transport) + prefactor * transient;
    }
    return std::clamp(value, 0.0, 1.0);
}

/// Probability of observing one particle inside the receiver at time t.
/// With equilibrium_approx the transient z-factor is replaced by its
/// steady-state value.
inline double prob_obs(double t, const ChannelGeometry& geometry,
                       const TransportParams& transport, const SeriesControl& series = {},
                       bool equilibrium_approx = false) {
    const double pz = equilibrium_approx ? equilibrium_prob_obs_z(geometry, transport)
                                         : prob_obs_z(t, geometry, transport, series);
    return prob_obs_x(t, geometry, transport) * pz;
}

/// Expected number of particles inside the receiver over time.
struct ImpulseResponse {
    std::vector<double> times;
    std::vector<double> counts;
};

/// Size-averaged impulse response for an explicit batch of core radii:
/// N(t) = sum_i P_ob,i(t) with per-particle transport from each radius.
inline ImpulseResponse impulse_response(const std::vector<double>& times,
                                        const Scenario& scenario,
                                        const std::vector<double>& radii,
                                        const SeriesControl& series = {},
                                        bool equilibrium_approx = false) {
    for (double t : times) {
        if (!(t > 0.0)) throw std::domain_error("impulse_response requires times > 0");
    }
    ImpulseResponse out;
    out.times = times;
    out.counts.assign(times.size(), 0.0);
    for (double radius : radii) {
        const TransportParams transport = scenario.transport_for(radius);
        for (std::size_t k = 0; k < times.size(); ++k) {
            out.counts[k] +=
                prob_obs(times[k], scenario.geometry, transport, series, equilibrium_approx);
        }
    }
    return out;
}

/// Impulse response of n_tx released particles. With sd_radius = 0 this is
/// exactly n_tx * P_ob(t) (the nominal impulse response); otherwise radii
/// are drawn from the seed-determined batch shared with the simulator.
inline ImpulseResponse impulse_response(const std::vector<double>& times,
                                        const Scenario& scenario, std::size_t n_tx,
                                        std::uint64_t seed, const SeriesControl& series = {},
                                        bool equilibrium_approx = false) {
    if (scenario.sizes.sd_radius == 0.0) {
        for (double t : times) {
            if (!(t > 0.0)) throw std::domain_error("impulse_response requires times > 0");
        }
        ImpulseResponse out;
        out.times = times;
        out.counts.resize(times.size());
        const TransportParams transport = scenario.nominal_transport();
        for (std::size_t k = 0; k < times.size(); ++k) {
            out.counts[k] = static_cast<double>(n_tx) * prob_obs(times[k], scenario.geometry,
                                                                 transport, series,
                                                                 equilibrium_approx);
        }
        return out;
    }
    const auto radii = sample_release_radii(scenario.sizes, n_tx, seed);
    return impulse_response(times, scenario, radii, series, equilibrium_approx);
}

}  // namespace mnpmc
