#include "sag/goodput_game.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sag/errors.hpp"
#include "sag/lambert_w.hpp"

namespace sag::goodput {

namespace {

void require_price(double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw DomainError("rho must be a non-negative finite number");
  }
}

// Team maximiser on [0, 1]: the closed form clamped into the simplex. Used
// where the unconstrained optimum may leave [0, 1] (lambda C < 1).
double constrained_team_map(double rho, const ContentionModel& model) {
  if (rho >= 1.0) {
    return 0.0;
  }
  const double p = (1.0 - lambert_w(rho * std::numbers::e)) / model.load();
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double utility(double p_tag, double p, double rho, const ContentionModel& model) {
  require_probability(p_tag, "p_tag");
  require_probability(p, "p");
  require_price(rho);
  return p_tag * (std::exp(-p * model.load()) - rho);
}

Equilibrium sne(double rho, const ContentionModel& model) {
  require_price(rho);
  model.validate();
  Equilibrium eq;
  eq.stable = true;  // the replicator flow points toward p* from both sides
  if (rho >= 1.0) {
    eq.p_star = 0.0;
    eq.branch = EquilibriumKind::Boundary0;
  } else if (rho <= std::exp(-model.load())) {
    eq.p_star = 1.0;
    eq.branch = EquilibriumKind::Boundary1;
  } else {
    eq.p_star = -std::log(rho) / model.load();
    eq.branch = EquilibriumKind::Interior;
  }
  eq.utility_at_eq = utility(eq.p_star, eq.p_star, rho, model);
  return eq;
}

double equilibrium_goodput(double rho, const ContentionModel& model) {
  require_price(rho);
  model.validate();
  const double load = model.load();
  if (rho >= 1.0) {
    return 0.0;
  }
  if (rho <= std::exp(-load)) {
    return std::exp(-load);
  }
  return -rho * std::log(rho) / load;
}

double optimal_price(const ContentionModel& model) {
  model.validate();
  return model.load() > 1.0 ? 1.0 / std::numbers::e : std::exp(-model.load());
}

double replicator_rhs(double p, double rho, const ContentionModel& model) {
  require_probability(p, "p");
  return p * (1.0 - p) * (std::exp(-model.load() * p) - rho);
}

Trajectory replicator_trajectory(double p0, double rho, const ContentionModel& model,
                                 double horizon, double step) {
  if (!(p0 > 0.0 && p0 < 1.0)) {
    throw DomainError("replicator_trajectory: p0 must lie in (0, 1)");
  }
  if (!(horizon > 0.0) || !(step > 0.0) || step >= horizon) {
    throw ParameterError("replicator_trajectory: need 0 < step < horizon");
  }
  require_price(rho);
  model.validate();

  const auto f = [&](double p) { return replicator_rhs(std::clamp(p, 0.0, 1.0), rho, model); };
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));

  Trajectory traj;
  traj.model = model;
  traj.rho = rho;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(p0);

  double p = p0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * step;
    const double t = (k == steps) ? horizon : static_cast<double>(k) * step;
    const double h = t - t_prev;
    const double k1 = f(p);
    const double k2 = f(p + 0.5 * h * k1);
    const double k3 = f(p + 0.5 * h * k2);
    const double k4 = f(p + h * k3);
    p = std::clamp(p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0, 1.0);
    traj.times.push_back(t);
    traj.states.push_back(p);
  }

  traj.terminal_gap = std::abs(p - sne(rho, model).p_star);
  traj.converged = traj.terminal_gap <= 1e-6;
  return traj;
}

double team_utility(double p, double rho, const ContentionModel& model) {
  return model.lambda * utility(p, p, rho, model);
}

TeamOptimum team_optimizer(double rho, const ContentionModel& model) {
  require_price(rho);
  model.validate();
  if (rho > 1.0) {
    return {0.0, 0.0, std::nullopt};
  }
  const double w = lambert_w(rho * std::numbers::e);
  if (model.load() < 1.0 && w < 1.0 - model.load()) {
    throw DomainError("team_optimizer: W(rho e) < 1 - lambda C, the stationary point exceeds 1");
  }
  TeamOptimum opt;
  opt.p_m = std::max(0.0, (1.0 - w) / model.load());
  opt.u_max = team_utility(opt.p_m, rho, model);
  if (w > 0.0) {
    opt.closed_form_u_max = rho * (1.0 - w) * (1.0 - w) / (model.C * w);
  }
  return opt;
}

PoAReport poa(double rho, const ContentionModel& model) {
  require_price(rho);
  model.validate();
  PoAReport report;
  report.team_map = constrained_team_map(rho, model);
  report.team_optimum = team_utility(report.team_map, rho, model);

  const Equilibrium eq = sne(rho, model);
  report.worst_equilibrium_map = eq.p_star;
  report.worst_equilibrium = model.lambda * eq.utility_at_eq;
  // At and above exp(-lambda C) the equilibrium utility is exactly zero
  // (interior: exp(-lambda C p*) = rho); rounding must not turn it into a ratio.
  if (rho < std::exp(-model.load())) {
    report.ratio = report.team_optimum / report.worst_equilibrium;
  }
  return report;
}

}  // namespace sag::goodput
