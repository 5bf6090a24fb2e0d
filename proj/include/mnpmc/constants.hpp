#pragma once

namespace mnpmc {

/// Boltzmann constant in J/K (exact value of the 2019 SI redefinition).
inline constexpr double k_boltzmann = 1.380649e-23;

inline constexpr double pi = 3.14159265358979323846;

inline constexpr const char* version = "0.1.0";

}  // namespace mnpmc
