#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mnpmc/constants.hpp"

namespace mnpmc {

/// Carrier fluid. Water at room temperature in the reference setup.
struct FluidEnvironment {
    double viscosity = 1e-3;    ///< dynamic viscosity eta, kg m^-1 s^-1
    double temperature = 300.0; ///< fluid temperature T_f, K

    void validate() const {
        if (!(viscosity > 0.0)) throw std::invalid_argument("fluid.viscosity must be > 0");
        if (!(temperature > 0.0)) throw std::invalid_argument("fluid.temperature must be > 0");
    }
};

/// External magnetic field, linearized across the channel. The gradient
/// points toward the magnet below the channel (negative z), so only its
/// magnitude is stored. The field magnitude B enters the magnetization
/// curve only; the saturation assumption makes it irrelevant elsewhere.
struct MagnetField {
    double gradient_magnitude = 5.0; ///< |dB/dz|, T/m
    double magnitude = 0.0;          ///< B, T (magnetization curve only)

    void validate() const {
        if (!(gradient_magnitude >= 0.0))
            throw std::invalid_argument("field.gradient_magnitude must be >= 0");
        if (!(magnitude >= 0.0)) throw std::invalid_argument("field.magnitude must be >= 0");
    }
};

/// One nanoparticle: magnetic core of radius R_m plus nonmagnetic coating
/// of constant thickness R_c.
struct ParticleModel {
    double core_radius;              ///< R_m, m
    double coating_thickness;        ///< R_c, m
    double saturation_magnetization; ///< M_s, A/m

    /// R_h = R_m + R_c
    double hydrodynamic_radius() const noexcept { return core_radius + coating_thickness; }
    /// V_m = (4/3) pi R_m^3
    double core_volume() const noexcept {
        return 4.0 / 3.0 * pi * core_radius * core_radius * core_radius;
    }

    void validate() const {
        if (!(core_radius > 0.0)) throw std::invalid_argument("particle.core_radius must be > 0");
        if (!(coating_thickness >= 0.0))
            throw std::invalid_argument("particle.coating_thickness must be >= 0");
        if (!(saturation_magnetization > 0.0))
            throw std::invalid_argument("particle.saturation_magnetization must be > 0");
    }
};

/// Core-radius dispersion of a particle batch. mean_radius and sd_radius
/// are the arithmetic mean and standard deviation of R_m itself; the
/// underlying log-normal is moment matched to them. sd_radius = 0
/// degenerates to the deterministic nominal size.
struct SizeDistribution {
    double mean_radius; ///< m_R, m
    double sd_radius;   ///< s_R, m

    void validate() const {
        if (!(mean_radius > 0.0)) throw std::invalid_argument("sizes.mean_radius must be > 0");
        if (!(sd_radius >= 0.0)) throw std::invalid_argument("sizes.sd_radius must be >= 0");
    }
};

/// Langevin function L(s) = coth(s) - 1/s.
///
/// Below |s| = 0.05 the closed form loses digits to cancellation, so the
/// odd series s/3 - s^3/45 is used instead; both branches agree to better
/// than 1e-8 at the switchover.
inline double langevin(double s) noexcept {
    if (std::abs(s) < 0.05) {
        return s * (1.0 / 3.0 - s * s / 45.0);
    }
    return 1.0 / std::tanh(s) - 1.0 / s;
}

/// Average magnetization M(B) of a thermally agitated particle, A/m.
/// Saturates to M_s for large B; M(0) = 0.
inline double magnetization(double field_magnitude, const ParticleModel& particle,
                            const FluidEnvironment& env) {
    const double arg = particle.core_volume() * particle.saturation_magnetization *
                       field_magnitude / (k_boltzmann * env.temperature);
    return particle.saturation_magnetization * langevin(arg);
}

/// Magnitude of the magnetic force on a saturated particle, N. The force
/// is constant under the affine-field assumption and directed toward the
/// magnet, i.e. toward z = 0.
inline double magnetic_force(const ParticleModel& particle, const MagnetField& field) noexcept {
    return particle.core_volume() * particle.saturation_magnetization *
           field.gradient_magnitude;
}

/// Terminal magnetophoretic speed v_m toward z = 0, m/s. Balances the
/// magnetic force against Stokes drag zeta = 6 pi eta R_h.
inline double drift_velocity(const ParticleModel& particle, const MagnetField& field,
                             const FluidEnvironment& env) {
    const double r = particle.core_radius;
    return 2.0 * particle.saturation_magnetization / (9.0 * env.viscosity) * r * r * r /
           particle.hydrodynamic_radius() * field.gradient_magnitude;
}

/// Diffusion coefficient from the Einstein relation k_B T_f = D zeta, m^2/s.
inline double diffusion_coefficient(const ParticleModel& particle, const FluidEnvironment& env) {
    return k_boltzmann * env.temperature /
           (6.0 * pi * env.viscosity * particle.hydrodynamic_radius());
}

/// Draws n i.i.d. core radii from the moment-matched log-normal:
/// sigma^2 = ln(1 + s_R^2/m_R^2), mu = ln(m_R) - sigma^2/2, so that the
/// samples have arithmetic mean m_R and standard deviation s_R.
inline std::vector<double> sample_radii(const SizeDistribution& dist, std::size_t n,
                                        std::mt19937_64& rng) {
    dist.validate();
    std::vector<double> radii(n, dist.mean_radius);
    if (dist.sd_radius == 0.0) return radii;

    const double ratio = dist.sd_radius / dist.mean_radius;
    const double sigma2 = std::log1p(ratio * ratio);
    const double mu = std::log(dist.mean_radius) - 0.5 * sigma2;
    std::lognormal_distribution<double> lognormal(mu, std::sqrt(sigma2));
    for (auto& r : radii) r = lognormal(rng);
    return radii;
}

}  // namespace mnpmc
