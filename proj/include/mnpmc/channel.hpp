#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mnpmc/physics.hpp"
#include "mnpmc/rng.hpp"

namespace mnpmc {

/// Bounded 2-D channel geometry. Particles diffuse in 0 <= z <= height and
/// -inf < x < inf. The transmitter releases at (tx_distance, release_height),
/// the transparent receiver occupies |x| <= receiver_width/2,
/// 0 <= z <= receiver_height at the bottom wall.
struct ChannelGeometry {
    double height;          ///< h, m
    double tx_distance;     ///< d, m
    double receiver_width;  ///< c_x, m
    double receiver_height; ///< c_z, m
    /// z0, m. NaN (the default) releases at the top wall z0 = h.
    double tx_release_height = std::numeric_limits<double>::quiet_NaN();

    double release_height() const noexcept {
        return std::isnan(tx_release_height) ? height : tx_release_height;
    }

    bool inside_receiver(double x, double z) const noexcept {
        return std::abs(x) <= 0.5 * receiver_width && z >= 0.0 && z <= receiver_height;
    }

    void validate() const {
        if (!(height > 0.0)) throw std::invalid_argument("geometry.height must be > 0");
        if (!(tx_distance >= 0.0)) throw std::invalid_argument("geometry.tx_distance must be >= 0");
        if (!(receiver_width > 0.0))
            throw std::invalid_argument("geometry.receiver_width must be > 0");
        if (!(receiver_height > 0.0 && receiver_height <= height))
            throw std::invalid_argument(
                "geometry.receiver_height must satisfy 0 < receiver_height <= height");
        const double z0 = release_height();
        if (!(z0 >= 0.0 && z0 <= height))
            throw std::invalid_argument(
                "geometry.tx_release_height must lie within [0, height]");
    }
};

/// Transport coefficients of one particle size. Speeds are stored as
/// nonnegative magnitudes; the flow carries particles toward -x and the
/// magnetic drift toward z = 0, as fixed by the geometry.
struct TransportParams {
    double diffusion;      ///< D, m^2/s
    double flow_speed;     ///< v_f, m/s, downstream (-x)
    double magnetic_drift; ///< v_m, m/s, toward z = 0

    /// u = v_m / (2D), the decay-rate parameter of the z-series.
    double drift_rate_u() const noexcept { return magnetic_drift / (2.0 * diffusion); }

    void validate() const {
        if (!(diffusion > 0.0)) throw std::invalid_argument("transport.diffusion must be > 0");
        if (!(flow_speed >= 0.0)) throw std::invalid_argument("transport.flow_speed must be >= 0");
        if (!(magnetic_drift >= 0.0))
            throw std::invalid_argument("transport.magnetic_drift must be >= 0");
    }
};

/// Truncation control for the z-direction eigenfunction series.
struct SeriesControl {
    int n_terms = 500;            ///< hard cap on summed terms
    double tail_tolerance = 1e-9; ///< admissible tail bound, relative to the
                                  ///< natural scale (1/h for densities, 1 for
                                  ///< probabilities)

    void validate() const {
        if (n_terms < 1) throw std::invalid_argument("series.n_terms must be >= 1");
        if (!(tail_tolerance > 0.0))
            throw std::invalid_argument("series.tail_tolerance must be > 0");
    }
};

/// Full physical setup of one link: channel, fluid, magnet, particle batch.
struct Scenario {
    ChannelGeometry geometry;
    FluidEnvironment fluid;
    MagnetField field;
    SizeDistribution sizes;
    double flow_speed;               ///< v_f, m/s
    double coating_thickness;        ///< R_c, m
    double saturation_magnetization; ///< M_s, A/m

    ParticleModel particle(double core_radius) const noexcept {
        return ParticleModel{core_radius, coating_thickness, saturation_magnetization};
    }

    /// Transport coefficients for one sampled core radius.
    TransportParams transport_for(double core_radius) const {
        const ParticleModel p = particle(core_radius);
        return TransportParams{diffusion_coefficient(p, fluid), flow_speed,
                               drift_velocity(p, field, fluid)};
    }

    /// Transport of the nominal (mean-radius) particle.
    TransportParams nominal_transport() const { return transport_for(sizes.mean_radius); }

    void validate() const {
        geometry.validate();
        fluid.validate();
        field.validate();
        sizes.validate();
        if (!(flow_speed >= 0.0)) throw std::invalid_argument("scenario.flow_speed must be >= 0");
        particle(sizes.mean_radius).validate();
    }
};

/// Core radii of one released batch, derived deterministically from the
/// seed. The analytic impulse response and the particle simulation both use
/// this function so that size dispersion is paired between the two.
inline std::vector<double> sample_release_radii(const SizeDistribution& sizes, std::size_t n_tx,
                                                std::uint64_t seed) {
    auto rng = substream(seed, {stream_tag::release_radii});
    return sample_radii(sizes, n_tx, rng);
}

}  // namespace mnpmc
