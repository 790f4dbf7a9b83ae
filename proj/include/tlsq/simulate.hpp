#pragma once

// Synthetic Q(E_acc) datasets from a known model.

#include <cmath>
#include <cstdint>
#include <vector>

#include "tlsq/dataset.hpp"
#include "tlsq/error.hpp"
#include "tlsq/field_map.hpp"
#include "tlsq/model.hpp"
#include "tlsq/random.hpp"

namespace tlsq {

// Table-I electropolished-cavity truth for the interacting one-species model.
inline ModelSpec electropolished_truth() { return make_interacting(1.02e5, 6.04e-24, 21.3, 1.19e-11); }
inline constexpr double kElectropolishedSigma = 6.26e8;

inline ModelSpec anodized_truth() { return make_interacting(5.15e3, 1.16e-23, 205.0, 1.92e-11); }
inline constexpr double kAnodizedSigma = 3.23e8;

struct SimulationGrid {
  double e_acc_min = 1e3;  // V/m
  double e_acc_max = 1e6;  // V/m
  std::size_t n_points = 30;
};

/// Log-spaced grid with exact endpoints.
inline std::vector<double> log_grid(const SimulationGrid& grid) {
  if (!(grid.e_acc_min > 0.0)) throw UsageError("grid minimum must be positive");
  if (!(grid.e_acc_min < grid.e_acc_max)) throw UsageError("grid minimum must be below grid maximum");
  if (grid.n_points < 2) throw UsageError("grid needs at least two points");
  std::vector<double> e(grid.n_points);
  const double lo = std::log(grid.e_acc_min);
  const double hi = std::log(grid.e_acc_max);
  for (std::size_t i = 0; i < grid.n_points; ++i)
    e[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.n_points - 1));
  e.front() = grid.e_acc_min;
  e.back() = grid.e_acc_max;
  return e;
}

/// Q from `spec` on the grid plus independent Gaussian noise of width
/// `noise_sigma` (Q units). Points whose noisy Q would be non-positive are
/// redrawn.
inline Dataset simulate_dataset(const ModelSpec& spec, const FieldMap& map, const SimulationGrid& grid,
                                double noise_sigma, std::uint64_t seed, double temperature = 1.5,
                                double frequency = 1.3e9) {
  spec.validate();
  if (!(noise_sigma >= 0.0)) throw UsageError("noise sigma must be non-negative");
  Rng rng(seed);
  Dataset data;
  data.temperature = temperature;
  data.frequency = frequency;
  for (double e : log_grid(grid)) {
    const double q = model_q(spec, map, e);
    double noisy = q + noise_sigma * rng.normal();
    while (!(noisy > 0.0)) noisy = q + noise_sigma * rng.normal();
    data.points.push_back({e, noisy});
  }
  return data;
}

}  // namespace tlsq
