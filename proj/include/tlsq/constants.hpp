#pragma once

#include <numbers>

// CODATA 2018 SI values (exact where the SI defines them).
namespace tlsq::constants {

inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double boltzmann = 1.380649e-23;       // J / K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F / m
inline constexpr double speed_of_light = 299792458.0;   // m / s
inline constexpr double pi = std::numbers::pi;

// First zero of the Bessel function J0.
inline constexpr double bessel_j0_zero1 = 2.404825557695773;

}  // namespace tlsq::constants
