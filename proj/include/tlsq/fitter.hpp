#pragma once

// Chi-square fitting of loss models to Q(E_acc) data: plateau noise estimate,
// multi-start Nelder-Mead in log/logit coordinates, conditional profile errors
// and ranked model comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <optional>
#include <string>
#include <vector>

#include "tlsq/dataset.hpp"
#include "tlsq/error.hpp"
#include "tlsq/field_map.hpp"
#include "tlsq/model.hpp"
#include "tlsq/nelder_mead.hpp"
#include "tlsq/random.hpp"

namespace tlsq {

inline constexpr std::size_t kMinPlateauPoints = 4;

/// Sample standard deviation (n - 1) of Q over included points with
/// e_acc <= plateau_cutoff.
inline double estimate_sigma_exp(const Dataset& data, double plateau_cutoff) {
  std::vector<double> qs;
  for (const auto& p : data.included())
    if (p.e_acc <= plateau_cutoff) qs.push_back(p.q);
  if (qs.size() < kMinPlateauPoints)
    throw InsufficientDataError(fmt::format(
        "plateau below {} V/m has {} points; at least {} are needed to estimate sigma_exp",
        plateau_cutoff, qs.size(), kMinPlateauPoints));
  double mean = 0.0;
  for (double q : qs) mean += q;
  mean /= static_cast<double>(qs.size());
  double ss = 0.0;
  for (double q : qs) ss += (q - mean) * (q - mean);
  return std::sqrt(ss / static_cast<double>(qs.size() - 1));
}

/// Upper edge of the lowest quartile of included e_acc values.
inline double default_plateau_cutoff(const Dataset& data) {
  const auto pts = data.included();
  if (pts.empty()) throw InsufficientDataError("dataset has no included points");
  const std::size_t count = std::max<std::size_t>(1, (pts.size() + 3) / 4);
  return pts[count - 1].e_acc;
}

/// sum over included points of ((Q_model - Q_i) / sigma)^2
inline double chi2(const ModelSpec& spec, const Dataset& data, const FieldMap& map, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("chi2: sigma must be positive");
  double sum = 0.0;
  for (const auto& p : data.points) {
    if (p.e_acc > data.e_acc_max_included) continue;
    const double r = (model_q(spec, map, p.e_acc) - p.q) / sigma;
    sum += r * r;
  }
  return sum;
}

struct FitConfig {
  std::size_t n_starts = 8;
  double tol = 1e-6;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> sigma;           // overrides the plateau estimate
  std::optional<double> plateau_cutoff;  // V/m; default lowest quartile
  std::size_t max_evals_per_run = 20000;
  std::size_t max_restarts = 25;
  bool profile_errors = true;
  QuadratureSpec quad;
};

// Signed offsets from the best-fit value. An empty side means chi2/DoF never
// rose by 1 within a factor 1e3 of the best fit (or the physical domain).
struct ProfileBound {
  std::optional<double> lower;
  std::optional<double> upper;
};

struct StartOutcome {
  std::vector<double> params;
  double chi2 = 0.0;
  std::size_t evals = 0;
  bool converged = false;
};

struct FitResult {
  ModelSpec model;
  std::vector<ParamInfo> layout;
  double chi2 = 0.0;
  std::size_t n_points = 0;
  std::size_t dof = 0;
  double chi2_per_dof = 0.0;
  double sigma_exp = 0.0;
  std::vector<ProfileBound> param_errors;
  std::vector<bool> near_bound;
  std::size_t n_starts_converged = 0;
  std::vector<StartOutcome> starts;
  std::vector<std::string> warnings;
  std::string dataset_label;

  const std::vector<double>& params() const { return model.params; }
  std::string name() const { return model.id.name(); }
};

namespace detail {

inline double logit(double p) { return std::log(p / (1.0 - p)); }

struct InternalBox {
  double lo;
  double hi;
};

inline InternalBox internal_box(const ParamInfo& info) {
  if (info.transform == Transform::logit) return {logit(1e-5), logit(1.0 - 1e-9)};
  return {std::log(info.lower), std::log(info.upper)};
}

inline double to_internal(const ParamInfo& info, double value) {
  if (info.transform == Transform::logit) return logit(std::min(value, 1.0 - 1e-12));
  return std::log(value);
}

inline double from_internal(const ParamInfo& info, double u) {
  if (info.transform == Transform::logit) return 1.0 / (1.0 + std::exp(-u));
  return std::exp(u);
}

// Start point: log-uniform inside the search bounds, uniform beta in [0.05, 0.95].
inline std::vector<double> random_start(const std::vector<ParamInfo>& layout, Rng& rng) {
  std::vector<double> u;
  for (const auto& info : layout) {
    if (info.transform == Transform::logit)
      u.push_back(logit(rng.uniform(0.05, 0.95)));
    else
      u.push_back(rng.uniform(std::log(info.lower), std::log(info.upper)));
  }
  return u;
}

}  // namespace detail

// Objective in the optimiser's coordinates. Points outside the search box are
// evaluated at the clamped point with a quadratic penalty on the excursion.
class Chi2Objective {
 public:
  Chi2Objective(ModelSpec spec, const Dataset& data, const FieldMap& map, double sigma)
      : spec_(std::move(spec)), layout_(parameter_layout(spec_.id)), data_(data), map_(map),
        sigma_(sigma) {}

  std::vector<double> to_params(const std::vector<double>& u) const {
    std::vector<double> params(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const auto box = detail::internal_box(layout_[k]);
      params[k] = detail::from_internal(layout_[k], std::clamp(u[k], box.lo, box.hi));
    }
    return params;
  }

  double operator()(const std::vector<double>& u) const {
    double excursion = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const auto box = detail::internal_box(layout_[k]);
      const double d = u[k] - std::clamp(u[k], box.lo, box.hi);
      excursion += d * d;
    }
    ModelSpec trial = spec_;
    trial.params = to_params(u);
    const double value = chi2(trial, data_, map_, sigma_);
    return value + (value + 1.0) * excursion;
  }

  const std::vector<ParamInfo>& layout() const { return layout_; }

 private:
  ModelSpec spec_;
  std::vector<ParamInfo> layout_;
  const Dataset& data_;
  const FieldMap& map_;
  double sigma_;
};

namespace detail {

// Signed offset from `best` to where f crosses `target`, moving in one
// direction with geometrically growing relative steps (1e-4, doubling, capped
// at a factor 1e3) and then bisecting until |f - target| < 1e-4. Empty when the
// target is not reached before the cap or the domain edge.
template <typename F>
std::optional<double> profile_crossing(double best, double domain_lower, double domain_upper,
                                       double target, bool upward, F&& f) {
  constexpr double kMaxFactor = 1e3;
  constexpr double kTargetTol = 1e-4;
  double inside = best;
  double outside = best;
  for (double step = 1e-4;; step *= 2.0) {
    const double factor = std::min(1.0 + step, kMaxFactor);
    double candidate = upward ? best * factor : best / factor;
    bool at_domain_edge = false;
    if (upward && candidate >= domain_upper) {
      candidate = domain_upper;
      at_domain_edge = true;
    }
    if (!upward && candidate <= domain_lower) {
      candidate = domain_lower;
      at_domain_edge = true;
    }
    if (candidate == best) return std::nullopt;
    if (f(candidate) >= target) {
      outside = candidate;
      break;
    }
    inside = candidate;
    if (at_domain_edge || factor >= kMaxFactor) return std::nullopt;
  }
  double lo = inside;
  double hi = outside;
  double mid = hi;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double value = f(mid);
    if (std::abs(value - target) < kTargetTol) break;
    if (value >= target)
      hi = mid;
    else
      lo = mid;
    if (std::abs(hi - lo) <= 1e-15 * std::abs(best)) {
      mid = hi;
      break;
    }
  }
  return mid - best;
}

}  // namespace detail

/// Conditional 1-sigma interval for parameter `index`: the other parameters
/// stay frozen at the best fit, and the parameter is moved in each direction
/// until chi2/DoF exceeds its minimum by 1.
inline ProfileBound profile_error(const FitResult& result, std::size_t index, const Dataset& data,
                                  const FieldMap& map, double sigma) {
  if (index >= result.model.params.size()) throw DomainError("profile_error: index out of range");
  if (result.dof == 0) throw DomainError("profile_error: fit has no degrees of freedom");
  const ParamInfo& info = result.layout[index];
  const double best = result.model.params[index];
  const double dof = static_cast<double>(result.dof);
  const double target = result.chi2_per_dof + 1.0;
  ModelSpec trial = result.model;
  auto reduced = [&](double value) {
    trial.params[index] = value;
    return chi2(trial, data, map, sigma) / dof;
  };
  return ProfileBound{
      detail::profile_crossing(best, info.domain_lower, info.domain_upper, target, false, reduced),
      detail::profile_crossing(best, info.domain_lower, info.domain_upper, target, true, reduced)};
}

/// Multi-start Nelder-Mead fit of one model to the included points.
inline FitResult fit(const ModelId& id, const Dataset& data, const FieldMap& map,
                     const FitConfig& cfg = {}) {
  data.validate();
  const auto included = data.included();
  const auto layout = parameter_layout(id);
  if (included.size() < kMinFitPoints)
    throw InsufficientDataError(fmt::format("dataset too small: {} points at e_acc <= {} V/m, "
                                            "at least {} required",
                                            included.size(), data.e_acc_max_included,
                                            kMinFitPoints));
  if (included.size() <= layout.size())
    throw InsufficientDataError(fmt::format("{} has {} parameters but only {} points are included",
                                            id.name(), layout.size(), included.size()));
  if (cfg.n_starts == 0) throw UsageError("at least one optimizer start is required");

  const double sigma = cfg.sigma ? *cfg.sigma
                                 : estimate_sigma_exp(data, cfg.plateau_cutoff
                                                                ? *cfg.plateau_cutoff
                                                                : default_plateau_cutoff(data));
  if (!(sigma > 0.0))
    throw DomainError("sigma_exp is zero: the plateau points are identical, so chi2 is undefined");

  ModelSpec base{id, {}, ThermalContext::from_frequency(data.temperature, data.frequency), cfg.quad};
  Chi2Objective objective(base, data, map, sigma);

  NelderMeadOptions nm;
  nm.f_rel_tol = cfg.tol;
  nm.max_evals = cfg.max_evals_per_run;

  FitResult result;
  result.layout = layout;
  for (std::size_t s = 0; s < cfg.n_starts; ++s) {
    Rng rng(Rng::substream_seed(cfg.seed, s));
    auto run = nelder_mead(objective, detail::random_start(layout, rng), nm);
    std::size_t evals = run.evals;
    // Restart from the best vertex until a fresh simplex stops improving.
    for (std::size_t r = 0; r < cfg.max_restarts; ++r) {
      auto again = nelder_mead(objective, run.x, nm);
      evals += again.evals;
      const bool improved = again.f < run.f - (cfg.tol * std::abs(run.f) + nm.f_abs_tol);
      if (again.f < run.f) run = std::move(again);
      if (!improved) break;
    }
    result.starts.push_back({objective.to_params(run.x), run.f, evals, run.converged});
  }

  const auto best_it = std::min_element(
      result.starts.begin(), result.starts.end(),
      [](const StartOutcome& a, const StartOutcome& b) { return a.chi2 < b.chi2; });
  const double best_chi2 = best_it->chi2;
  for (const auto& start : result.starts)
    if (start.chi2 - best_chi2 <= 1e-3 * best_chi2 + 1e-9) ++result.n_starts_converged;

  const std::size_t needed = std::min<std::size_t>(2, cfg.n_starts);
  if (result.n_starts_converged < needed) {
    std::string report = fmt::format(
        "{}: optimizer starts disagree; only {} of {} reached the best chi2 = {}", id.name(),
        result.n_starts_converged, cfg.n_starts, best_chi2);
    for (std::size_t s = 0; s < result.starts.size(); ++s)
      report += fmt::format("\n  start {}: chi2 = {} ({} evals)", s, result.starts[s].chi2,
                            result.starts[s].evals);
    throw ConvergenceError(report);
  }

  result.model = base;
  result.model.params = best_it->params;
  result.chi2 = best_chi2;
  result.n_points = included.size();
  result.dof = included.size() - layout.size();
  result.chi2_per_dof = result.chi2 / static_cast<double>(result.dof);
  result.sigma_exp = sigma;
  result.dataset_label = data.label;

  for (std::size_t k = 0; k < layout.size(); ++k) {
    const double v = result.model.params[k];
    const auto& info = layout[k];
    bool near = false;
    if (info.transform == Transform::log)
      near = v <= info.lower * 1.01 || v >= info.upper * 0.99;
    else
      near = v >= 0.99 * info.upper || v <= info.lower + 0.01 * (info.upper - info.lower);
    result.near_bound.push_back(near);
    if (near)
      result.warnings.push_back(fmt::format("degenerate fit: {} = {} is within 1% of its search bound",
                                            info.name, v));
  }

  if (cfg.profile_errors)
    for (std::size_t k = 0; k < layout.size(); ++k)
      result.param_errors.push_back(profile_error(result, k, data, map, sigma));
  return result;
}

/// Results ordered by chi2/DoF, ties broken by fewer free parameters.
inline std::vector<FitResult> compare_models(std::vector<FitResult> results) {
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].dataset_label != results[0].dataset_label ||
        results[i].sigma_exp != results[0].sigma_exp)
      throw InvariantError("compare_models: results were fitted on different datasets ('" +
                           results[0].dataset_label + "' vs '" + results[i].dataset_label + "')");
  }
  std::stable_sort(results.begin(), results.end(), [](const FitResult& a, const FitResult& b) {
    if (a.chi2_per_dof != b.chi2_per_dof) return a.chi2_per_dof < b.chi2_per_dof;
    return a.model.n_free() < b.model.n_free();
  });
  return results;
}

inline std::string format_value_with_errors(double value, const ProfileBound& bound) {
  const std::string lo = bound.lower ? fmt::format("{:.3g}", *bound.lower) : "unbounded";
  const std::string hi = bound.upper ? fmt::format("+{:.3g}", *bound.upper) : "+unbounded";
  return fmt::format("{:.4g} [{}, {}]", value, lo, hi);
}

/// Plain-text ranking table. Errors are conditional 1-sigma (others frozen).
inline std::string format_comparison_table(const std::vector<FitResult>& ranked) {
  std::string out = fmt::format("{:<4} {:<14} {:>10} {:>5}  {}\n", "rank", "model", "chi2/DoF",
                                "DoF", "parameters (conditional 1-sigma errors)");
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    std::string params;
    for (std::size_t k = 0; k < r.layout.size(); ++k) {
      if (k) params += "; ";
      params += r.layout[k].name + " = ";
      params += k < r.param_errors.size() ? format_value_with_errors(r.params()[k], r.param_errors[k])
                                          : fmt::format("{:.4g}", r.params()[k]);
      if (k < r.near_bound.size() && r.near_bound[k]) params += " (at bound)";
    }
    out += fmt::format("{:<4} {:<14} {:>10.4g} {:>5}  {}\n", i + 1, r.name(), r.chi2_per_dof, r.dof,
                       params);
  }
  return out;
}

}  // namespace tlsq
