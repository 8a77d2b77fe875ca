#pragma once

/**
 * \file goodput_game.hpp
 * \brief Medium access game with goodput utility and linear energy price.
 *
 * A tagged node transmitting with probability p' while everyone else uses p
 * earns U(p', p) = p' (exp(-p lambda C) - rho). The utility is linear in p',
 * so equilibria are either dominant boundary strategies or the indifference
 * point exp(-p lambda C) = rho.
 */

#include <optional>

#include "sag/game_types.hpp"
#include "sag/spatial_model.hpp"

namespace sag::goodput {

double utility(double p_tag, double p, double rho, const ContentionModel& model);

/// Symmetric Nash equilibrium; unique for every rho >= 0.
Equilibrium sne(double rho, const ContentionModel& model);

/// g(p*, p*)
double equilibrium_goodput(double rho, const ContentionModel& model);

/// Price that makes the equilibrium density of success equal the team optimum.
double optimal_price(const ContentionModel& model);

/// dp/dt = p (1 - p) (exp(-lambda C p) - rho)
double replicator_rhs(double p, double rho, const ContentionModel& model);

/// Fixed-step RK4 with every state clamped to [0, 1].
/// \throws ParameterError if step >= horizon or either is non-positive.
Trajectory replicator_trajectory(double p0, double rho, const ContentionModel& model,
                                 double horizon = 1000.0, double step = 0.01);

/// lambda p exp(-p lambda C) - lambda p rho
double team_utility(double p, double rho, const ContentionModel& model);

struct TeamOptimum {
  double p_m = 0.0;
  double u_max = 0.0;
  /// rho (1 - W(rho e))^2 / (C W(rho e)); empty where W(rho e) = 0.
  std::optional<double> closed_form_u_max;
};

/**
 * \brief Maximiser of the team utility, p_m = (1 - W0(rho e)) / (lambda C).
 *
 * For rho > 1 returns (0, 0). When lambda C < 1 the formula is only valid
 * while W(rho e) >= 1 - lambda C; outside that range it throws DomainError.
 */
TeamOptimum team_optimizer(double rho, const ContentionModel& model);

/// Ratio of the team optimum to lambda U(p*, p*); infinite when U(p*, p*) <= 0.
PoAReport poa(double rho, const ContentionModel& model);

}  // namespace sag::goodput
