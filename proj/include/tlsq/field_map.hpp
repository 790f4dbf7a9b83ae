#pragma once

// Discretised cavity-surface electric field with quadrature weights.

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tlsq/constants.hpp"
#include "tlsq/csv.hpp"
#include "tlsq/error.hpp"
#include "tlsq/quadrature.hpp"

namespace tlsq {

struct FieldSample {
  double r;            // m
  double z;            // m
  double e_norm;       // |E| in V/m at reference normalisation
  double area_weight;  // m^2
};

struct FieldMap {
  std::vector<FieldSample> samples;
  double w_total_ref = 0.0;  // stored electric energy (J) at reference normalisation
  double e_acc_ref = 0.0;    // accelerating field (V/m) at reference normalisation
  std::string label;

  double total_area() const {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.area_weight;
    return sum;
  }

  // Stored energy when the mode is driven to the given accelerating field.
  double w_total(double e_acc) const {
    const double scale = e_acc / e_acc_ref;
    return w_total_ref * scale * scale;
  }

  void validate() const {
    if (samples.empty()) throw InvariantError("field map: sample list is empty");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      if (!(s.e_norm >= 0.0))
        throw InvariantError("field map: e_norm must be >= 0 (sample " + std::to_string(i) + ")");
      if (!(s.area_weight > 0.0))
        throw InvariantError("field map: area_weight must be > 0 (sample " + std::to_string(i) + ")");
    }
    if (!(w_total_ref > 0.0)) throw InvariantError("field map: w_total_ref must be > 0");
    if (!(e_acc_ref > 0.0)) throw InvariantError("field map: e_acc_ref must be > 0");
  }
};

struct PillboxGeometry {
  double radius = 0.0883;  // m, puts TM010 at ~1.3 GHz
  double length = 0.1;     // m
  std::size_t n_radial = 64;
};

inline double pillbox_resonance_frequency(double radius) {
  if (!(radius > 0.0)) throw DomainError("pillbox radius must be positive");
  return constants::bessel_j0_zero1 * constants::speed_of_light / (2.0 * constants::pi * radius);
}

/// TM010 mode of a cylindrical pillbox with unit on-axis amplitude, sampled on
/// the two end caps at Gauss-Legendre radii. Each sample stands for both caps,
/// so its weight is 2 * 2 pi r w_i. The barrel wall carries no normal field and
/// is left out. E_acc is identified with the on-axis amplitude (no transit-time
/// factor).
inline FieldMap pillbox_surface_map(const PillboxGeometry& geom) {
  if (!(geom.radius > 0.0) || !(geom.length > 0.0))
    throw DomainError("pillbox geometry must have positive radius and length");
  if (geom.n_radial < 8) throw DomainError("pillbox map needs n_radial >= 8");

  constexpr double e0 = 1.0;
  const double x01 = constants::bessel_j0_zero1;
  const auto rule = composite_gauss_legendre(0.0, geom.radius, 1, geom.n_radial);

  FieldMap map;
  map.samples.reserve(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.nodes[i];
    const double e = e0 * std::abs(std::cyl_bessel_j(0.0, x01 * r / geom.radius));
    map.samples.push_back({r, 0.0, e, 2.0 * 2.0 * constants::pi * r * rule.weights[i]});
  }
  const double j1 = std::cyl_bessel_j(1.0, x01);
  map.w_total_ref = constants::vacuum_permittivity / 4.0 * e0 * e0 * geom.length * constants::pi *
                    geom.radius * geom.radius * j1 * j1;
  map.e_acc_ref = e0;
  map.label = fmt::format("pillbox TM010 R={} m L={} m n_radial={}", geom.radius, geom.length,
                          geom.n_radial);
  return map;
}

/// Local surface fields when the mode is driven to `e_acc`.
inline std::vector<double> scale_to_eacc(const FieldMap& map, double e_acc) {
  if (!(e_acc >= 0.0)) throw DomainError("accelerating field must be non-negative");
  const double scale = e_acc / map.e_acc_ref;
  std::vector<double> fields;
  fields.reserve(map.samples.size());
  for (const auto& s : map.samples) fields.push_back(s.e_norm * scale);
  return fields;
}

// CSV layout: `# w_total_ref=`, `# e_acc_ref=`, `# label=` headers, then
// rows r_m,z_m,e_norm_V_per_m,area_weight_m2. Extra comment lines are allowed.
inline void write_field_map(std::ostream& out, const FieldMap& map,
                            std::span<const std::string> preamble = {}) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  out << fmt::format("# w_total_ref={}\n# e_acc_ref={}\n# label={}\n", map.w_total_ref,
                     map.e_acc_ref, map.label);
  out << "r_m,z_m,e_norm_V_per_m,area_weight_m2\n";
  for (const auto& s : map.samples)
    out << fmt::format("{},{},{},{}\n", s.r, s.z, s.e_norm, s.area_weight);
}

inline FieldMap read_field_map(std::istream& in) {
  const csv::Document doc = csv::parse(in, 4);
  FieldMap map;
  map.w_total_ref = csv::header_double(doc, "w_total_ref");
  map.e_acc_ref = csv::header_double(doc, "e_acc_ref");
  if (const std::string* label = doc.find("label")) map.label = *label;
  map.samples.reserve(doc.rows.size());
  for (const auto& row : doc.rows) map.samples.push_back({row[0], row[1], row[2], row[3]});
  map.validate();
  return map;
}

inline FieldMap load_field_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field map '" + path + "'", 0, 0);
  return read_field_map(in);
}

}  // namespace tlsq
