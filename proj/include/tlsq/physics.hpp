#pragma once

// Microscopic TLS quantities implied by fitted E_c and c.

#include <cmath>
#include <string>

#include "tlsq/constants.hpp"
#include "tlsq/error.hpp"
#include "tlsq/kernels.hpp"

namespace tlsq {

// Typical atomic TLS dipole, |e| x 1 Angstrom.
inline constexpr double kDefaultDipole = 1e-29;  // C m
// Spread of TLS asymmetry energies, in kelvin.
inline constexpr double kDefaultDeltaSpreadK = 3.0;
inline constexpr double kDefaultOxideEpsR = 33.0;

namespace detail {
inline void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}
}  // namespace detail

/// Critical field from dipole and coherence: sqrt(3/2) hbar / (p sqrt(T1 T2)).
inline double critical_field(double dipole, double sqrt_t1t2) {
  detail::require_positive(dipole, "dipole moment");
  detail::require_positive(sqrt_t1t2, "sqrt(T1 T2)");
  return std::sqrt(1.5) * constants::hbar / (dipole * sqrt_t1t2);
}

/// sqrt(T1 T2) = sqrt(3/2) hbar / (p E_c), in seconds.
inline double sqrt_t1t2_from_ec(double dipole, double e_c) {
  detail::require_positive(dipole, "dipole moment");
  detail::require_positive(e_c, "critical field");
  return std::sqrt(1.5) * constants::hbar / (dipole * e_c);
}

/// TLS area density (1/m^2) from the species coefficient, with
/// rho' = sigma_TLS / (pi Delta) and Delta = k_B * delta_spread_k.
inline double area_density_from_c(double c, double dipole, const ThermalContext& ctx,
                                  double delta_spread_k) {
  detail::require_positive(c, "species coefficient");
  detail::require_positive(dipole, "dipole moment");
  detail::require_positive(delta_spread_k, "asymmetry spread");
  const double rho_area = energy_area_density(c, dipole, ctx);
  return rho_area * constants::pi * constants::boltzmann * delta_spread_k;
}

/// Zero-field, low-temperature loss tangent of an oxide layer of the given
/// thickness: 4 c 2 k_B T / (eps_r eps0 d hbar omega0).
inline double zero_field_loss_tangent(double c, const ThermalContext& ctx, double thickness,
                                      double eps_r) {
  detail::require_positive(c, "species coefficient");
  detail::require_positive(thickness, "oxide thickness");
  detail::require_positive(eps_r, "relative permittivity");
  if (!(ctx.temperature > 0.0) || !(ctx.omega0 > 0.0))
    throw DomainError("thermal context requires positive temperature and frequency");
  return 4.0 * c * 2.0 * constants::boltzmann * ctx.temperature /
         (eps_r * constants::vacuum_permittivity * thickness * constants::hbar * ctx.omega0);
}

struct MicroscopicInputs {
  double e_c;
  double c;
  double thickness;
  double eps_r = kDefaultOxideEpsR;
  double delta_spread_k = kDefaultDeltaSpreadK;
  double dipole = kDefaultDipole;
};

struct MicroscopicEstimate {
  double dipole_assumed;
  double sqrt_t1t2;
  double sigma_tls_area;  // 1/m^2
  double tan_delta_zero_field;
  MicroscopicInputs inputs_echo;
};

inline MicroscopicEstimate derive_microscopic(const MicroscopicInputs& in, const ThermalContext& ctx) {
  return MicroscopicEstimate{in.dipole, sqrt_t1t2_from_ec(in.dipole, in.e_c),
                             area_density_from_c(in.c, in.dipole, ctx, in.delta_spread_k),
                             zero_field_loss_tangent(in.c, ctx, in.thickness, in.eps_r), in};
}

}  // namespace tlsq
