#pragma once

// Forward model: 1/Q as a function of accelerating field for each loss model.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlsq/error.hpp"
#include "tlsq/field_map.hpp"
#include "tlsq/kernels.hpp"
#include "tlsq/quadrature.hpp"

namespace tlsq {

enum class ModelKind {
  interacting_one_species,
  noninteracting,  // N species, see ModelId::n_species
  beta,
  dist_gaussian_ec,
  dist_exponential_ec,
  dist_gaussian_dipole,
  dist_exponential_dipole,
};

struct ModelId {
  ModelKind kind = ModelKind::interacting_one_species;
  int n_species = 1;

  std::string name() const {
    switch (kind) {
      case ModelKind::interacting_one_species: return "interacting";
      case ModelKind::noninteracting: return "nonint" + std::to_string(n_species);
      case ModelKind::beta: return "beta";
      case ModelKind::dist_gaussian_ec: return "gauss_ec";
      case ModelKind::dist_exponential_ec: return "exp_ec";
      case ModelKind::dist_gaussian_dipole: return "gauss_dipole";
      case ModelKind::dist_exponential_dipole: return "exp_dipole";
    }
    return "unknown";
  }

  std::string description() const {
    switch (kind) {
      case ModelKind::interacting_one_species: return "interacting one species + non-TLS offset";
      case ModelKind::noninteracting:
        return "noninteracting " + std::to_string(n_species) + "-species + non-TLS offset";
      case ModelKind::beta: return "exponent beta + non-TLS offset";
      case ModelKind::dist_gaussian_ec: return "Gaussian E_c + non-TLS offset";
      case ModelKind::dist_exponential_ec: return "exponential E_c + non-TLS offset";
      case ModelKind::dist_gaussian_dipole: return "Gaussian dipole (c ~ p^2, E_c ~ 1/p) + non-TLS offset";
      case ModelKind::dist_exponential_dipole: return "exponential dipole (c ~ p^2, E_c ~ 1/p) + non-TLS offset";
    }
    return "unknown";
  }

  bool is_surface_integral() const { return kind != ModelKind::beta; }

  bool operator==(const ModelId&) const = default;
};

inline ModelId parse_model_id(std::string_view name) {
  if (name == "interacting") return {ModelKind::interacting_one_species, 1};
  if (name == "beta") return {ModelKind::beta, 1};
  if (name == "gauss_ec") return {ModelKind::dist_gaussian_ec, 1};
  if (name == "exp_ec") return {ModelKind::dist_exponential_ec, 1};
  if (name == "gauss_dipole") return {ModelKind::dist_gaussian_dipole, 1};
  if (name == "exp_dipole") return {ModelKind::dist_exponential_dipole, 1};
  if (name.starts_with("nonint")) {
    const auto digits = name.substr(6);
    int n = 0;
    for (char ch : digits) {
      if (ch < '0' || ch > '9') { n = 0; break; }
      n = n * 10 + (ch - '0');
    }
    if (!digits.empty() && n >= 1 && n <= 16) return {ModelKind::noninteracting, n};
  }
  throw UsageError("unknown model '" + std::string(name) +
                   "' (expected interacting, nonint<N>, beta, gauss_ec, exp_ec, gauss_dipole, "
                   "exp_dipole)");
}

// How a parameter is mapped to the optimizer's unconstrained coordinate.
enum class Transform { log, logit };

struct ParamInfo {
  std::string name;
  std::string unit;
  Transform transform = Transform::log;
  double lower = 0.0;  // search bounds
  double upper = 0.0;
  double domain_lower = 0.0;  // hard physical limits for profile scans
  double domain_upper = std::numeric_limits<double>::infinity();
};

namespace bounds {
inline constexpr double e_c_lo = 1e1, e_c_hi = 1e8;
inline constexpr double c_lo = 1e-27, c_hi = 1e-20;
inline constexpr double xi_lo = 1.0, xi_hi = 1e6;
inline constexpr double q_lo = 1e-13, q_hi = 1e-9;
inline constexpr double f_delta_lo = 1e-13, f_delta_hi = 1e-8;
inline constexpr double beta_lo = 0.0, beta_hi = 1.0;
inline constexpr double width_lo = 1e-3, width_hi = 3.0;
}  // namespace bounds

inline std::vector<ParamInfo> parameter_layout(const ModelId& id) {
  using namespace bounds;
  const ParamInfo e_c{"e_c", "V/m", Transform::log, e_c_lo, e_c_hi};
  const ParamInfo c{"c", "C^2/J", Transform::log, c_lo, c_hi};
  const ParamInfo q{"q_nontls_inv", "", Transform::log, q_lo, q_hi};
  const ParamInfo width{"rel_width", "", Transform::log, width_lo, width_hi};
  switch (id.kind) {
    case ModelKind::interacting_one_species:
      return {e_c, c, ParamInfo{"xi", "", Transform::log, xi_lo, xi_hi, 1.0}, q};
    case ModelKind::noninteracting: {
      std::vector<ParamInfo> layout;
      for (int j = 1; j <= id.n_species; ++j) {
        const std::string suffix = id.n_species == 1 ? "" : std::to_string(j);
        layout.push_back({"e_c" + suffix, "V/m", Transform::log, e_c_lo, e_c_hi});
        layout.push_back({"c" + suffix, "C^2/J", Transform::log, c_lo, c_hi});
      }
      layout.push_back(q);
      return layout;
    }
    case ModelKind::beta:
      return {ParamInfo{"f_delta", "", Transform::log, f_delta_lo, f_delta_hi}, e_c,
              ParamInfo{"beta", "", Transform::logit, beta_lo, beta_hi, 0.0, 1.0}, q};
    case ModelKind::dist_gaussian_ec:
      return {ParamInfo{"e_c_mean", "V/m", Transform::log, e_c_lo, e_c_hi}, width, c, q};
    case ModelKind::dist_exponential_ec:
      return {ParamInfo{"e_c_scale", "V/m", Transform::log, e_c_lo, e_c_hi}, c, q};
    case ModelKind::dist_gaussian_dipole:
      return {e_c, width, c, q};
    case ModelKind::dist_exponential_dipole:
      return {e_c, c, q};
  }
  return {};
}

// Composite Gauss-Legendre settings for distribution averages. The result is
// taken from 2 * panels and checked against `panels`.
struct QuadratureSpec {
  std::size_t panels = 8;
  std::size_t order = 16;
  double tolerance = 1e-6;
};

struct ModelSpec {
  ModelId id;
  std::vector<double> params;
  ThermalContext ctx{1.5, 2.0 * constants::pi * 1.3e9};
  QuadratureSpec quad;

  std::size_t n_free() const { return params.size(); }
  double q_nontls_inv() const { return params.back(); }

  void validate() const {
    const auto layout = parameter_layout(id);
    if (params.size() != layout.size())
      throw InvariantError(id.name() + ": expected " + std::to_string(layout.size()) +
                           " parameters, got " + std::to_string(params.size()));
    for (std::size_t k = 0; k < params.size(); ++k) {
      const std::string& name = layout[k].name;
      const double v = params[k];
      if (!std::isfinite(v)) throw DomainError(id.name() + ": " + name + " is not finite");
      bool ok = v > 0.0;
      if (name == "q_nontls_inv" || name == "f_delta" || name.starts_with("c")) ok = v >= 0.0;
      if (name == "xi") ok = v >= 1.0;
      if (name == "beta") ok = v > 0.0 && v <= 1.0;
      if (!ok) throw DomainError(id.name() + ": parameter " + name + " out of domain");
    }
  }
};

// Interacting model parameters: e_c, c, xi, q_nontls_inv.
inline ModelSpec make_interacting(double e_c, double c, double xi, double q_nontls_inv) {
  return ModelSpec{{ModelKind::interacting_one_species, 1}, {e_c, c, xi, q_nontls_inv}};
}

// Species as (e_c, c) pairs followed by the offset.
inline ModelSpec make_noninteracting(const std::vector<std::pair<double, double>>& species,
                                     double q_nontls_inv) {
  ModelSpec spec{{ModelKind::noninteracting, static_cast<int>(species.size())}, {}};
  for (const auto& [e_c, c] : species) {
    spec.params.push_back(e_c);
    spec.params.push_back(c);
  }
  spec.params.push_back(q_nontls_inv);
  return spec;
}

inline ModelSpec make_beta(double f_delta, double e_c, double beta, double q_nontls_inv) {
  return ModelSpec{{ModelKind::beta, 1}, {f_delta, e_c, beta, q_nontls_inv}};
}

// ---------------------------------------------------------------------------
// Distribution averages
//
// Critical-field distributions average the kernel over E_c directly.
// Dipole distributions work in u = p / p_mean: a species with dipole u p_mean
// has E_c = E_c(mean) / u and coefficient c(mean) u^2. The u^2 weight is folded
// into the density and the average is normalised by its zero-field value, so
// the model's c is the ensemble zero-field coefficient.

enum class DistShape { gaussian, exponential };
enum class DistVariable { critical_field, dipole };

struct ParameterDistribution {
  DistShape shape = DistShape::gaussian;
  DistVariable variable = DistVariable::critical_field;
  // gaussian/critical_field: mean E_c; exponential/critical_field: scale of E_c;
  // dipole variants: E_c of the mean-dipole species.
  double center = 0.0;
  double rel_width = 0.0;  // gaussian only: sigma / mean
};

// Integration support of the truncated density, in the distributed variable
// (E_c for critical-field, u for dipole). Tail mass outside is < 1e-14.
struct DistributionSupport {
  double lower;
  double upper;
};

inline DistributionSupport distribution_support(const ParameterDistribution& d) {
  constexpr double kSigmas = 8.0;
  constexpr double kFloor = 1e-12;
  const double mean = d.variable == DistVariable::critical_field ? d.center : 1.0;
  switch (d.shape) {
    case DistShape::gaussian: {
      const double sigma = d.rel_width * mean;
      return {std::max(mean - kSigmas * sigma, kFloor * mean), mean + kSigmas * sigma};
    }
    case DistShape::exponential:
      // u^2 e^-u needs a longer tail than e^-x.
      return {kFloor * mean, (d.variable == DistVariable::dipole ? 50.0 : 40.0) * mean};
  }
  return {0.0, 0.0};
}

// Unnormalised density of the distributed variable, including the u^2 weight
// for dipole variants.
inline double distribution_density(const ParameterDistribution& d, double x) {
  const double mean = d.variable == DistVariable::critical_field ? d.center : 1.0;
  double density = 0.0;
  if (d.shape == DistShape::gaussian) {
    const double z = (x - mean) / (d.rel_width * mean);
    density = std::exp(-0.5 * z * z);
  } else {
    density = std::exp(-x / mean);
  }
  if (d.variable == DistVariable::dipole) density *= x * x;
  return density;
}

inline double distribution_critical_field(const ParameterDistribution& d, double x) {
  return d.variable == DistVariable::critical_field ? x : d.center / x;
}

inline void validate_distribution(const ParameterDistribution& d) {
  if (!(d.center > 0.0)) throw DomainError("distribution: center must be positive");
  if (d.shape == DistShape::gaussian && !(d.rel_width > 0.0))
    throw DomainError("distribution: relative width must be positive");
}

// Quadrature nodes for one distribution: critical fields and weights whose
// sum is `total_weight`. Integration runs in log of the distributed variable.
struct DistributionRule {
  std::vector<double> critical_fields;
  std::vector<double> weights;
  double total_weight = 0.0;

  DistributionRule(const ParameterDistribution& d, std::size_t panels, std::size_t order) {
    validate_distribution(d);
    const auto support = distribution_support(d);
    // The far low tail is long in log space but carries little mass; give it
    // its own coarser segment so the main body gets the resolution.
    const double mean = d.variable == DistVariable::critical_field ? d.center : 1.0;
    const double split = std::max(support.lower, 1e-3 * mean);
    if (split > support.lower) add(d, support.lower, split, std::max<std::size_t>(1, panels / 4), order);
    add(d, split, support.upper, panels, order);
  }

  template <typename Kernel>
  double average(double e, Kernel&& kernel) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) sum += weights[i] * kernel(e, critical_fields[i]);
    return sum / total_weight;
  }

 private:
  void add(const ParameterDistribution& d, double lo, double hi, std::size_t panels, std::size_t order) {
    const auto rule = composite_gauss_legendre(std::log(lo), std::log(hi), panels, order);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double x = std::exp(rule.nodes[i]);
      const double w = rule.weights[i] * x * distribution_density(d, x);
      critical_fields.push_back(distribution_critical_field(d, x));
      weights.push_back(w);
      total_weight += w;
    }
  }
};

struct NoninteractingKernel {
  double operator()(double e, double e_c) const { return kernel_noninteracting(e, e_c); }
};

/// Distribution-averaged loss factor at local field `e`. Evaluated with
/// `quad.panels` and twice as many panels; the finer value is returned and a
/// QuadratureError is raised if the two differ by more than quad.tolerance.
template <typename Kernel = NoninteractingKernel>
double dist_average(const ParameterDistribution& dist, double e, const QuadratureSpec& quad,
                    Kernel&& kernel = {}) {
  if (!(e >= 0.0)) throw DomainError("field must be non-negative");
  const DistributionRule coarse(dist, quad.panels, quad.order);
  const DistributionRule fine(dist, 2 * quad.panels, quad.order);
  const double a = coarse.average(e, kernel);
  const double b = fine.average(e, kernel);
  if (std::abs(a - b) > quad.tolerance * std::abs(b))
    throw QuadratureError("distribution average did not converge at e = " + std::to_string(e) +
                          " V/m (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  return b;
}

// Distribution and coefficient encoded by a distribution-model spec.
inline ParameterDistribution model_distribution(const ModelSpec& spec) {
  const auto& p = spec.params;
  switch (spec.id.kind) {
    case ModelKind::dist_gaussian_ec:
      return {DistShape::gaussian, DistVariable::critical_field, p[0], p[1]};
    case ModelKind::dist_exponential_ec:
      return {DistShape::exponential, DistVariable::critical_field, p[0], 0.0};
    case ModelKind::dist_gaussian_dipole:
      return {DistShape::gaussian, DistVariable::dipole, p[0], p[1]};
    case ModelKind::dist_exponential_dipole:
      return {DistShape::exponential, DistVariable::dipole, p[0], 0.0};
    default:
      throw DomainError(spec.id.name() + " is not a distribution model");
  }
}

inline double distribution_coefficient(const ModelSpec& spec) {
  switch (spec.id.kind) {
    case ModelKind::dist_gaussian_ec:
    case ModelKind::dist_gaussian_dipole: return spec.params[2];
    case ModelKind::dist_exponential_ec:
    case ModelKind::dist_exponential_dipole: return spec.params[1];
    default: throw DomainError(spec.id.name() + " is not a distribution model");
  }
}

// ---------------------------------------------------------------------------

/// Surface-integral 1/Q at accelerating field `e_acc`:
///   (1/W_total) sum_j c_j sum_s |E_s|^2 K_j(E_s) A_s + 1/Q_nonTLS.
/// The |E|^2 / W_total ratio is taken at reference normalisation, so e_acc = 0
/// needs no special casing.
inline double inverse_q(const ModelSpec& spec, const FieldMap& map, double e_acc) {
  if (!spec.id.is_surface_integral())
    throw DomainError("inverse_q: beta model is not a surface-integral model");
  if (!(e_acc >= 0.0)) throw DomainError("accelerating field must be non-negative");
  const double scale = e_acc / map.e_acc_ref;
  const auto& p = spec.params;

  double tls = 0.0;
  switch (spec.id.kind) {
    case ModelKind::interacting_one_species: {
      const double e_c = p[0], c = p[1], xi = p[2];
      double sum = 0.0;
      for (const auto& s : map.samples)
        sum += s.e_norm * s.e_norm * s.area_weight * bracket_interp(s.e_norm * scale, e_c, xi);
      tls = c * sum;
      break;
    }
    case ModelKind::noninteracting: {
      for (int j = 0; j < spec.id.n_species; ++j) {
        const double e_c = p[2 * j], c = p[2 * j + 1];
        double sum = 0.0;
        for (const auto& s : map.samples)
          sum += s.e_norm * s.e_norm * s.area_weight * kernel_noninteracting(s.e_norm * scale, e_c);
        tls += c * sum;
      }
      break;
    }
    default: {
      const auto dist = model_distribution(spec);
      const DistributionRule coarse(dist, spec.quad.panels, spec.quad.order);
      const DistributionRule fine(dist, 2 * spec.quad.panels, spec.quad.order);
      const NoninteractingKernel kernel;
      double sum = 0.0;
      for (const auto& s : map.samples) {
        const double e = s.e_norm * scale;
        const double a = coarse.average(e, kernel);
        const double b = fine.average(e, kernel);
        if (std::abs(a - b) > spec.quad.tolerance * std::abs(b))
          throw QuadratureError(spec.id.name() + ": distribution average did not converge at e = " +
                                std::to_string(e) + " V/m");
        sum += s.e_norm * s.e_norm * s.area_weight * b;
      }
      tls = distribution_coefficient(spec) * sum;
      break;
    }
  }
  return tls / map.w_total_ref + spec.q_nontls_inv();
}

/// Lumped participation-ratio model: f_delta / (1 + (E_acc/E_c)^2)^beta + 1/Q_nonTLS.
inline double inverse_q_beta(const ModelSpec& spec, double e_acc) {
  if (spec.id.kind != ModelKind::beta) throw DomainError("inverse_q_beta: not a beta model");
  const auto& p = spec.params;
  return p[0] * kernel_beta(e_acc, p[1], p[2]) + p[3];
}

inline double model_inverse_q(const ModelSpec& spec, const FieldMap& map, double e_acc) {
  return spec.id.kind == ModelKind::beta ? inverse_q_beta(spec, e_acc) : inverse_q(spec, map, e_acc);
}

inline double model_q(const ModelSpec& spec, const FieldMap& map, double e_acc) {
  return 1.0 / model_inverse_q(spec, map, e_acc);
}

}  // namespace tlsq
