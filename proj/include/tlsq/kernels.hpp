#pragma once

// Dimensionless TLS loss kernels. All fields are in V/m.

#include <cmath>
#include <string>

#include "tlsq/constants.hpp"
#include "tlsq/error.hpp"

namespace tlsq {

// Below this distance from 1 the spectral-diffusion parameter is treated as
// exactly 1 and the bracket collapses to the noninteracting kernel.
inline constexpr double kXiUnityWindow = 1e-6;

struct ThermalContext {
  double temperature;  // K
  double omega0;       // rad/s

  static ThermalContext from_frequency(double temperature_k, double frequency_hz) {
    return make(temperature_k, 2.0 * constants::pi * frequency_hz);
  }

  static ThermalContext make(double temperature_k, double omega0) {
    if (!(temperature_k > 0.0)) throw DomainError("temperature must be positive");
    if (!(omega0 > 0.0)) throw DomainError("resonance frequency must be positive");
    return ThermalContext{temperature_k, omega0};
  }

  double frequency() const { return omega0 / (2.0 * constants::pi); }
};

// One TLS species: critical field, coefficient, spectral-diffusion parameter.
struct TLSSpecies {
  double e_c;  // V/m
  double c;    // C^2/J
  double xi;   // >= 1

  static TLSSpecies make(double e_c, double c, double xi = 1.0) {
    if (!(e_c > 0.0)) throw DomainError("TLS species: e_c must be positive");
    if (!(c > 0.0)) throw DomainError("TLS species: c must be positive");
    if (!(xi >= 1.0)) throw DomainError("TLS species: xi must be >= 1");
    return TLSSpecies{e_c, c, xi};
  }
};

namespace detail {

inline void check_field(double e, double e_c) {
  if (!(e >= 0.0)) throw DomainError("field must be non-negative");
  if (!(e_c > 0.0)) throw DomainError("critical field must be positive");
}

}  // namespace detail

/// 1 / sqrt(1 + (e/e_c)^2)
inline double kernel_noninteracting(double e, double e_c) {
  detail::check_field(e, e_c);
  const double x = e / e_c;
  return 1.0 / std::sqrt(1.0 + x * x);
}

/// Interpolating saturation factor between noninteracting (xi = 1) and
/// logarithmic interacting behaviour. Equals 1 at zero field, follows
/// ln(xi e_c / e) / ln(xi) for e_c << e << xi e_c and e_c / e beyond xi e_c.
///
/// The logarithm is evaluated as 0.5 log1p((xi^2 - 1) / (1 + (e/e_c)^2)), which
/// is algebraically identical to ln(xi sqrt((1 + (e/(xi e_c))^2) / (1 + (e/e_c)^2)))
/// and keeps full precision both at low field and deep in saturation.
inline double bracket_interp(double e, double e_c, double xi) {
  detail::check_field(e, e_c);
  if (!(xi >= 1.0)) throw DomainError("spectral-diffusion parameter xi must be >= 1");
  const double b = (e / e_c) * (e / e_c);
  if (xi - 1.0 < kXiUnityWindow) return 1.0 / std::sqrt(1.0 + b);

  const double x_hi = e / (xi * e_c);
  const double a = x_hi * x_hi;
  const double log_arg = 0.5 * std::log1p((xi * xi - 1.0) / (1.0 + b));
  const double log_xi = std::log(xi);
  return (1.0 - 1.0 / xi) / log_xi * log_arg + 1.0 / (xi * std::sqrt(1.0 + a));
}

/// Logarithmic asymptote ln(xi e_c / e) / ln(xi), valid on e_c <= e <= xi e_c.
/// Only used to validate bracket_interp.
inline double kernel_interacting_asymptote(double e, double e_c, double xi) {
  detail::check_field(e, e_c);
  if (!(xi > 1.0)) throw DomainError("interacting asymptote requires xi > 1");
  if (e < e_c || e > xi * e_c)
    throw DomainError("interacting asymptote is only valid for e_c <= e <= xi e_c");
  return std::log(xi * e_c / e) / std::log(xi);
}

/// Phenomenological exponent kernel 1 / (1 + (e_acc/e_c)^2)^beta. Takes the
/// accelerating field, not a local surface field.
inline double kernel_beta(double e_acc, double e_c, double beta) {
  detail::check_field(e_acc, e_c);
  if (!(beta > 0.0) || beta > 1.0) throw DomainError("beta must lie in (0, 1]");
  const double x = e_acc / e_c;
  return std::pow(1.0 + x * x, -beta);
}

/// tanh(hbar omega0 / (2 k_B T))
inline double thermal_factor(const ThermalContext& ctx) {
  if (!(ctx.temperature > 0.0) || !(ctx.omega0 > 0.0))
    throw DomainError("thermal context requires positive temperature and frequency");
  return std::tanh(constants::hbar * ctx.omega0 / (2.0 * constants::boltzmann * ctx.temperature));
}

/// c = (pi/12) p^2 tanh(hbar omega0 / 2 k_B T) rho', with rho' an energy-area
/// density in 1/(J m^2).
inline double species_coefficient(double dipole, double rho_area, const ThermalContext& ctx) {
  if (!(dipole > 0.0)) throw DomainError("dipole moment must be positive");
  if (!(rho_area > 0.0)) throw DomainError("energy-area density must be positive");
  return constants::pi / 12.0 * dipole * dipole * thermal_factor(ctx) * rho_area;
}

/// Inverse of species_coefficient for rho'.
inline double energy_area_density(double c, double dipole, const ThermalContext& ctx) {
  if (!(c > 0.0)) throw DomainError("species coefficient must be positive");
  if (!(dipole > 0.0)) throw DomainError("dipole moment must be positive");
  return 12.0 * c / (constants::pi * dipole * dipole * thermal_factor(ctx));
}

}  // namespace tlsq
