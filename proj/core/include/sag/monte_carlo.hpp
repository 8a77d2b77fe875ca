#pragma once

/**
 * \file monte_carlo.hpp
 * \brief Simulation of the tagged link in a Poisson bipolar network.
 *
 * Each snapshot places the tagged receiver at the origin and its transmitter
 * at distance r. Active interferers form a Poisson process of intensity
 * p lambda, generated in order of increasing distance out to the window
 * radius. Every link has independent Rayleigh fading with mean 1/mu, and the
 * snapshot succeeds when P F l(r) / (I + w) > T.
 *
 * Interferers beyond the window are not dropped. Because the tagged fading is
 * exponential, P(F > a + b) = P(F > a) P(F' > b) with F' an independent copy,
 * so the far field enters as an independent Bernoulli trial with success
 * probability E[exp(-mu T I_far / (P l(r)))], which is known exactly for a
 * Poisson field. The estimator is unbiased for every window; the window only
 * decides which interferers are simulated explicitly. Set
 * SimConfig::far_field = false to truncate instead.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sag/spatial_model.hpp"

namespace sag::mc {

struct SimConfig {
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 0;
  std::optional<double> window_radius;  ///< empty: resolved automatically
  std::uint64_t max_slots = 1000;       ///< local-delay censoring point
  double bias_tol = 1e-3;               ///< relative truncation bias for the automatic window
  bool far_field = true;                ///< account for interferers beyond the window
  unsigned threads = 0;                 ///< 0: std::thread::hardware_concurrency()

  void validate() const;
};

struct SimEstimate {
  double value = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(n)
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double window_radius = 0.0;
  double far_field_factor = 1.0;  ///< probability the far field lets the link through
  double censored_fraction = 0.0;
  std::vector<std::string> warnings;
};

struct LocalDelayEstimate {
  SimEstimate estimate;
  /// slot_counts[k] = number of runs that first succeeded in slot k (k >= 1).
  std::vector<std::uint64_t> slot_counts;
  std::uint64_t censored = 0;
};

struct GoodnessOfFit {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 0.0;
};

/// Mean number of interferers the automatic window may hold when the far
/// field is accounted for analytically.
inline constexpr double kMaxMeanInterferers = 400.0;

/**
 * \brief Window radius R whose dropped interference changes coverage by less
 * than bias_tol, from the tail bound
 * 2 pi p lambda T r^beta R^{2-beta} / (beta - 2) < -ln(1 - bias_tol).
 *
 * Never below r. For p = 0 there is no interference and 10 r is returned.
 */
double truncation_radius(const NetworkParams& params, double p, double bias_tol);

/// Window used by a run: the explicit radius, or the automatic choice
/// (truncation_radius, capped at kMaxMeanInterferers when far_field is on).
double resolve_window(const NetworkParams& params, double p, const SimConfig& sim);

/// Fraction of snapshots in which the tagged link is covered. p in (0, 1].
SimEstimate estimate_coverage(const NetworkParams& params, double p, const SimConfig& sim);

/// p_tag times the coverage seen when everyone else uses p. p_tag, p in [0, 1].
SimEstimate estimate_tagged_goodput(double p_tag, double p, const NetworkParams& params,
                                    const SimConfig& sim);

/**
 * \brief Slots until the tagged node transmits and is covered, with the whole
 * configuration (positions, fading, access decisions) redrawn every slot.
 *
 * Runs are censored at sim.max_slots. A CensoringWarning is recorded when more
 * than 1% of the runs are censored.
 */
LocalDelayEstimate estimate_local_delay(const NetworkParams& params, double p,
                                        const SimConfig& sim);

/// Chi-square test of the slot counts against Geometric(success_prob) on
/// {1, 2, ...}; cells are merged until each expects at least 5 runs.
GoodnessOfFit geometric_fit(const LocalDelayEstimate& delay, double success_prob);

}  // namespace sag::mc
