#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance run. Written from the formulas, not from the library code.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "tlsq/constants.hpp"
#include "tlsq/field_map.hpp"
#include "tlsq/model.hpp"

namespace tlsq::oracle {

using boost::math::quadrature::gauss_kronrod;

// (1/4) eps0 |E|^2 over the cylinder volume, midpoint rule on a 2000 x 2000 (r, z) grid.
inline double riemann_stored_energy(double radius, double length) {
  constexpr int n = 2000;
  const double dr = radius / n, dz = length / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * dr;
    const double e = std::cyl_bessel_j(0.0, constants::bessel_j0_zero1 * r / radius);
    double column = 0.0;
    for (int k = 0; k < n; ++k) column += e * e * dz;
    sum += column * 2.0 * constants::pi * r * dr;
  }
  return 0.25 * constants::vacuum_permittivity * sum;
}

// 16 samples with unrelated fields and weights; reference normalisation != 1.
inline FieldMap toy_map() {
  FieldMap map;
  for (int i = 0; i < 16; ++i) {
    const double e = 2.5 * std::pow(10.0, -0.2 * i) * (1.0 + 0.1 * std::sin(i));
    map.samples.push_back({0.001 * i, 0.002 * (i % 3), e, 1e-4 * (1.0 + 0.37 * i)});
  }
  map.w_total_ref = 3.7e-13;
  map.e_acc_ref = 2.5;
  map.label = "toy";
  return map;
}

// Independent transcription of the bracket, no log1p.
inline double oracle_bracket(double e, double e_c, double xi) {
  if (std::abs(xi - 1.0) < 1e-6) return 1.0 / std::sqrt(1.0 + (e / e_c) * (e / e_c));
  const double a = (e / (xi * e_c)) * (e / (xi * e_c));
  const double b = (e / e_c) * (e / e_c);
  return (1.0 - 1.0 / xi) / std::log(xi) * std::log(xi * std::sqrt((1.0 + a) / (1.0 + b))) +
         1.0 / (xi * std::sqrt(1.0 + a));
}

inline double oracle_noninteracting(double e, double e_c) { return 1.0 / std::sqrt(1.0 + e * e / (e_c * e_c)); }

// Adaptive Gauss-Kronrod in ln x over [a, b], split at the given points so
// each piece is smooth.
template <typename F>
double integrate_log(F f, double a, double b, std::vector<double> breaks) {
  std::vector<double> t = {std::log(a)};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks)
    if (x > a && x < b) t.push_back(std::log(x));
  t.push_back(std::log(b));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double err = 0.0;
    sum += gauss_kronrod<double, 61>::integrate([&](double s) { const double x = std::exp(s); return f(x) * x; },
                                                t[i], t[i + 1], 8, 1e-14, &err);
  }
  return sum;
}

// Average of the noninteracting kernel over the untruncated density
// (normalised numerically). Mass below 1e-30 of the mean is dropped.
inline double oracle_dist_average(const ParameterDistribution& d, double e) {
  if (d.variable == DistVariable::critical_field) {
    const double mu = d.center;
    auto k = [&](double x) { return oracle_noninteracting(e, x); };
    if (d.shape == DistShape::gaussian) {
      const double sigma = d.rel_width * mu;
      auto w = [&](double x) { return std::exp(-0.5 * std::pow((x - mu) / sigma, 2)); };
      const double hi = mu + 12.0 * sigma;
      return integrate_log([&](double x) { return w(x) * k(x); }, 1e-30 * mu, hi, {e, mu}) /
             integrate_log(w, 1e-30 * mu, hi, {mu});
    }
    return integrate_log([&](double x) { return std::exp(-x / mu) / mu * k(x); }, 1e-30 * mu, 60.0 * mu, {e, mu});
  }
  // Dipole: u = p / p_mean, E_c = center / u, c scales as u^2.
  auto k = [&](double u) { return oracle_noninteracting(e, d.center / u); };
  const double knee = e > 0.0 ? d.center / e : 1.0;
  if (d.shape == DistShape::gaussian) {
    const double sigma = d.rel_width;
    auto w = [&](double u) { return u * u * std::exp(-0.5 * std::pow((u - 1.0) / sigma, 2)); };
    const double hi = 1.0 + 12.0 * sigma;
    return integrate_log([&](double u) { return w(u) * k(u); }, 1e-30, hi, {knee, 1.0}) /
           integrate_log(w, 1e-30, hi, {1.0});
  }
  auto w = [&](double u) { return u * u * std::exp(-u); };
  return integrate_log([&](double u) { return w(u) * k(u); }, 1e-30, 80.0, {knee, 1.0}) / 2.0;
}

// Direct sum at the physical drive level: (1/W(e_acc)) sum c |E|^2 K A + q.
inline double oracle_inverse_q(const ModelSpec& spec, const FieldMap& map, double e_acc) {
  const auto& p = spec.params;
  if (spec.id.kind == ModelKind::beta)
    return p[0] / std::pow(1.0 + (e_acc / p[1]) * (e_acc / p[1]), p[2]) + p[3];
  const double s = e_acc / map.e_acc_ref;
  const double w_total = map.w_total_ref * s * s;
  double loss = 0.0;
  for (const auto& sample : map.samples) {
    const double e = sample.e_norm * s;
    double factor = 0.0;
    switch (spec.id.kind) {
      case ModelKind::interacting_one_species: factor = p[1] * oracle_bracket(e, p[0], p[2]); break;
      case ModelKind::noninteracting:
        for (int j = 0; j < spec.id.n_species; ++j) factor += p[2 * j + 1] * oracle_noninteracting(e, p[2 * j]);
        break;
      case ModelKind::dist_gaussian_ec:
        factor = p[2] * oracle_dist_average({DistShape::gaussian, DistVariable::critical_field, p[0], p[1]}, e);
        break;
      case ModelKind::dist_exponential_ec:
        factor = p[1] * oracle_dist_average({DistShape::exponential, DistVariable::critical_field, p[0], 0}, e);
        break;
      case ModelKind::dist_gaussian_dipole:
        factor = p[2] * oracle_dist_average({DistShape::gaussian, DistVariable::dipole, p[0], p[1]}, e);
        break;
      case ModelKind::dist_exponential_dipole:
        factor = p[1] * oracle_dist_average({DistShape::exponential, DistVariable::dipole, p[0], 0}, e);
        break;
      default: break;
    }
    loss += e * e * sample.area_weight * factor;
  }
  return loss / w_total + spec.q_nontls_inv();
}

inline std::vector<ModelSpec> all_kinds() {
  return {make_interacting(0.4, 6.04e-24, 21.3, 1.19e-11),
          make_interacting(0.05, 1.2e-23, 205.0, 2e-11),
          make_noninteracting({{0.3, 5e-24}}, 1e-11),
          make_noninteracting({{0.02, 3e-24}, {1.1, 4e-24}}, 1e-11),
          make_beta(5.25e-11, 0.2, 0.25, 1.42e-11),
          ModelSpec{{ModelKind::dist_gaussian_ec, 1}, {0.3, 0.4, 6e-24, 1e-11}},
          ModelSpec{{ModelKind::dist_exponential_ec, 1}, {0.3, 6e-24, 1e-11}},
          ModelSpec{{ModelKind::dist_gaussian_dipole, 1}, {0.3, 0.3, 6e-24, 1e-11}},
          ModelSpec{{ModelKind::dist_exponential_dipole, 1}, {0.3, 6e-24, 1e-11}}};
}

}  // namespace tlsq::oracle
