#pragma once

/**
 * \file delay_game.hpp
 * \brief Medium access game with potential-delay utility.
 *
 * U(p', p) = -exp(p lambda C) / p' - rho p'. The best response is
 * min{1, exp(p lambda C_bar) / sqrt(rho)}, and interior symmetric equilibria
 * solve p = exp(p lambda C_bar) / sqrt(rho), i.e.
 * p* = -W(-lambda C_bar / sqrt(rho)) / (lambda C_bar) on either real branch of
 * Lambert W. Which branches host an equilibrium in [0, 1] depends on rho
 * relative to rho_t = (e lambda C_bar)^2 and exp(2 lambda C_bar):
 *
 *   lambda C_bar <  1:  rho <= rho_0           -> {1}
 *                       rho >  rho_0           -> {W0}
 *   lambda C_bar >= 1:  rho <  rho_t           -> {1}
 *                       rho_t <= rho <= rho_-1 -> {W0, W-1}
 *                       rho >  rho_-1          -> {W0}
 *
 * with rho_0 = rho_-1 = exp(2 lambda C_bar), the price at which the boundary
 * equilibrium p = 1 solves the fixed point.
 */

#include <string>
#include <vector>

#include "sag/game_types.hpp"
#include "sag/lambert_w.hpp"
#include "sag/spatial_model.hpp"

namespace sag::delay {

enum class ContentionRegime {
  Small,  ///< lambda C_bar < 1
  Large,  ///< lambda C_bar >= 1
};

const char* to_string(ContentionRegime regime) noexcept;

struct DelayThresholds {
  double rho_t = 0.0;         ///< (e lambda C_bar)^2
  double rho_boundary = 0.0;  ///< exp(2 lambda C_bar): rho_0 (Small) or rho_-1 (Large)
  ContentionRegime regime = ContentionRegime::Small;
};

/// -exp(p lambda C) / p_tag - rho p_tag. Throws DomainError for p_tag = 0.
double utility(double p_tag, double p, double rho, const ContentionModel& model);

/// min{1, exp(p lambda C_bar) / sqrt(rho)}. Throws DomainError for rho <= 0.
double best_response(double p, double rho, const ContentionModel& model);

DelayThresholds thresholds(const ContentionModel& model);

/// Equilibrium-table row for rho: "unique_p1", "two_sne" or "unique_W0".
std::string regime_label(double rho, const ContentionModel& model);

/// All symmetric equilibria listed by the equilibrium table, sorted by p*.
/// At rho = rho_t the two Lambert branches coincide and one entry is returned.
std::vector<Equilibrium> sne_all(double rho, const ContentionModel& model);

/// Best-response slope criterion: interior equilibria are stable iff
/// lambda C_bar p* < 1; p* = 1 is stable iff the best response is clamped at
/// 1 on a left neighbourhood of 1.
bool stability(const Equilibrium& eq, double rho, const ContentionModel& model);

/// Per-node potential delay at the equilibrium on `branch`:
/// -rho W(-lambda C_bar / sqrt(rho)) / (lambda C_bar).
/// \throws DomainError if that branch hosts no equilibrium in [0, 1] at rho.
double equilibrium_delay(double rho, Branch branch, const ContentionModel& model);

struct DelayOptimum {
  double rho_star = 0.0;
  double p_star = 0.0;
  double d_t_eq = 0.0;  ///< lambda * equilibrium delay, the spatial delay density
};

DelayOptimum optimal_price(const ContentionModel& model);

/// h(rho) = -rho W(-lambda C_bar / sqrt(rho)), defined for sqrt(rho) >= e lambda C_bar.
double h_objective(double rho, Branch branch, const ContentionModel& model);

/// Best delay density reachable on the W-1 branch divided by the team optimum.
/// Requires lambda C_bar > 1.
double bad_equilibrium_penalty(const ContentionModel& model);

/// Root of exp(p lambda C)(1 - p lambda C) = rho p^2 in (0, 1/(lambda C)).
/// Requires lambda C > 1.
double team_optimizer(double rho, const ContentionModel& model);

/// -lambda exp(p lambda C) / p - lambda rho p
double team_utility(double p, double rho, const ContentionModel& model);

/**
 * \brief Price of anarchy at rho (requires lambda C > 1).
 *
 * ratio = U_team(p_m) / (lambda U(p*, p*)) for the worst listed equilibrium.
 * Both utilities are negative costs, so the ratio lies in (0, 1].
 */
PoAReport poa(double rho, const ContentionModel& model);

}  // namespace sag::delay
