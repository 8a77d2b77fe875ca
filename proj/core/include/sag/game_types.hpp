#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sag/spatial_model.hpp"

namespace sag {

/// Fairness exponent alpha = 0 (goodput) or alpha = 2 (potential delay).
enum class Metric { Goodput, PotentialDelay };

const char* to_string(Metric metric) noexcept;

struct GameConfig {
  double rho = 0.0;  ///< price per unit transmission energy, >= 0
  Metric metric = Metric::Goodput;

  void validate() const;
};

/// Where a symmetric equilibrium comes from.
enum class EquilibriumKind {
  Boundary0,         ///< p* = 0, nobody transmits
  Boundary1,         ///< p* = 1, everybody transmits
  Interior,          ///< goodput game indifference point
  LambertPrincipal,  ///< delay game, W0 branch
  LambertMinus1,     ///< delay game, W-1 branch
};

const char* to_string(EquilibriumKind kind) noexcept;

struct Equilibrium {
  double p_star = 0.0;
  EquilibriumKind branch = EquilibriumKind::Boundary0;
  bool stable = false;
  double utility_at_eq = 0.0;  ///< U(p*, p*)
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  ContentionModel model;
  double rho = 0.0;
  bool converged = false;     ///< final state within 1e-6 of the equilibrium
  double terminal_gap = 0.0;  ///< |p(horizon) - p*|
};

struct PoABounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct PoAReport {
  double team_optimum = 0.0;           ///< max_p U(p), the numerator
  double worst_equilibrium = 0.0;      ///< min over SNE of lambda U(p*, p*)
  double team_map = 0.0;               ///< p_m(rho)
  double worst_equilibrium_map = 0.0;  ///< p* of the worst equilibrium
  std::optional<double> ratio;         ///< empty when the PoA is infinite
  std::optional<PoABounds> bounds;     ///< analytic bounds, when they apply
  bool bounds_hold = true;

  /// Bounds exactly as printed in the original derivation, when they differ
  /// from the ones evaluated along the ratio chain.
  std::optional<PoABounds> literal_bounds;
  bool literal_bounds_discrepancy = false;

  [[nodiscard]] bool infinite() const noexcept { return !ratio.has_value(); }
};

}  // namespace sag
