#include "sag/delay_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "sag/errors.hpp"

namespace sag::delay {

namespace {

constexpr double kE = std::numbers::e;
// p* may exceed 1 by rounding at rho_0 / rho_-1, where it is exactly 1.
constexpr double kMapSlack = 1e-12;
// Two Lambert roots closer than this are one (double) equilibrium.
constexpr double kCoincide = 1e-9;

void require_positive_price(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("rho must be positive and finite for the delay game");
  }
}

double rho_t_of(double a) { return (kE * a) * (kE * a); }

// W(-a / sqrt(rho)); exactly -1 at rho = rho_t.
double lambert_at(double rho, Branch branch, double a) {
  if (rho == rho_t_of(a)) {
    return -1.0;
  }
  return lambert_w(-a / std::sqrt(rho), branch);
}

// The fixed point on `branch`, when it lies in [0, 1].
std::optional<double> branch_map(double rho, Branch branch, double a) {
  if (rho < rho_t_of(a)) {
    return std::nullopt;
  }
  const double p = -lambert_at(rho, branch, a) / a;
  if (p > 1.0 + kMapSlack) {
    return std::nullopt;
  }
  return std::min(p, 1.0);
}

Equilibrium make_equilibrium(double p, EquilibriumKind kind, double rho,
                             const ContentionModel& model) {
  Equilibrium eq;
  eq.p_star = p;
  eq.branch = kind;
  eq.utility_at_eq = utility(p, p, rho, model);
  eq.stable = stability(eq, rho, model);
  return eq;
}

double bisect(auto&& f, double lo, double hi) {
  // f(lo) > 0 > f(hi)
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(ContentionRegime regime) noexcept {
  return regime == ContentionRegime::Small ? "small_contention" : "large_contention";
}

double utility(double p_tag, double p, double rho, const ContentionModel& model) {
  require_probability(p_tag, "p_tag");
  require_probability(p, "p");
  if (p_tag == 0.0) {
    throw DomainError("delay utility is unbounded below at p_tag = 0");
  }
  if (!(rho >= 0.0)) {
    throw DomainError("rho must be non-negative");
  }
  return -std::exp(p * model.load()) / p_tag - rho * p_tag;
}

double best_response(double p, double rho, const ContentionModel& model) {
  require_probability(p, "p");
  require_positive_price(rho);
  return std::min(1.0, std::exp(p * model.half_load()) / std::sqrt(rho));
}

DelayThresholds thresholds(const ContentionModel& model) {
  model.validate();
  const double a = model.half_load();
  return {rho_t_of(a), std::exp(2.0 * a),
          a < 1.0 ? ContentionRegime::Small : ContentionRegime::Large};
}

std::string regime_label(double rho, const ContentionModel& model) {
  require_positive_price(rho);
  const DelayThresholds th = thresholds(model);
  if (th.regime == ContentionRegime::Small) {
    return rho <= th.rho_boundary ? "unique_p1" : "unique_W0";
  }
  if (rho < th.rho_t) {
    return "unique_p1";
  }
  return rho <= th.rho_boundary ? "two_sne" : "unique_W0";
}

std::vector<Equilibrium> sne_all(double rho, const ContentionModel& model) {
  require_positive_price(rho);
  const DelayThresholds th = thresholds(model);
  const double a = model.half_load();

  std::vector<Equilibrium> out;
  const bool p1_only = th.regime == ContentionRegime::Small ? rho <= th.rho_boundary
                                                            : rho < th.rho_t;
  if (p1_only) {
    out.push_back(make_equilibrium(1.0, EquilibriumKind::Boundary1, rho, model));
    return out;
  }

  const std::optional<double> p0 = branch_map(rho, Branch::Principal, a);
  const std::optional<double> pm1 = th.regime == ContentionRegime::Large
                                        ? branch_map(rho, Branch::Minus1, a)
                                        : std::nullopt;
  if (p0 && pm1 && std::abs(*pm1 - *p0) <= kCoincide) {
    Equilibrium eq = make_equilibrium(0.5 * (*p0 + *pm1), EquilibriumKind::LambertPrincipal, rho,
                                      model);
    eq.stable = false;  // slope exactly 1
    out.push_back(eq);
    return out;
  }
  if (p0) {
    out.push_back(make_equilibrium(*p0, EquilibriumKind::LambertPrincipal, rho, model));
  }
  if (pm1) {
    out.push_back(make_equilibrium(*pm1, EquilibriumKind::LambertMinus1, rho, model));
  }
  return out;
}

bool stability(const Equilibrium& eq, double rho, const ContentionModel& model) {
  require_positive_price(rho);
  const double a = model.half_load();
  if (eq.branch == EquilibriumKind::Boundary1) {
    const double unclamped = std::exp(a) / std::sqrt(rho);
    if (unclamped > 1.0) {
      return true;
    }
    return a < 1.0;
  }
  // slope of the best response at a fixed point: a exp(a p) / sqrt(rho) = a p
  return a * eq.p_star < 1.0 - kMapSlack;
}

double equilibrium_delay(double rho, Branch branch, const ContentionModel& model) {
  require_positive_price(rho);
  model.validate();
  const double a = model.half_load();
  if (!branch_map(rho, branch, a)) {
    throw DomainError(std::string("equilibrium_delay: no equilibrium on branch ") +
                      sag::to_string(branch) + " at this rho");
  }
  return -rho * lambert_at(rho, branch, a) / a;
}

DelayOptimum optimal_price(const ContentionModel& model) {
  model.validate();
  const double a = model.half_load();
  DelayOptimum opt;
  if (model.load() > 1.0) {
    opt.rho_star = 4.0 * kE * a * a;
    opt.p_star = 1.0 / (2.0 * a);
  } else {
    opt.rho_star = std::exp(2.0 * a);
    opt.p_star = 1.0;
  }
  opt.d_t_eq = model.lambda * equilibrium_delay(opt.rho_star, Branch::Principal, model);
  return opt;
}

double h_objective(double rho, Branch branch, const ContentionModel& model) {
  require_positive_price(rho);
  model.validate();
  const double a = model.half_load();
  if (rho < rho_t_of(a)) {
    throw DomainError("h_objective: requires sqrt(rho) >= e lambda C_bar");
  }
  return -rho * lambert_at(rho, branch, a);
}

double bad_equilibrium_penalty(const ContentionModel& model) {
  model.validate();
  const double a = model.half_load();
  if (!(a > 1.0)) {
    throw DomainError("bad_equilibrium_penalty: requires lambda C_bar > 1");
  }
  // h is increasing on W-1, so its minimum sits at the branch point rho_t,
  // where the W-1 equilibrium is 1/(lambda C_bar).
  const double rho = rho_t_of(a);
  const double density = model.lambda * h_objective(rho, Branch::Minus1, model) / a;
  return density / team_densities(model).delay;
}

double team_optimizer(double rho, const ContentionModel& model) {
  model.validate();
  if (!(model.load() > 1.0)) {
    throw DomainError("delay team_optimizer: requires lambda C > 1");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw DomainError("rho must be non-negative");
  }
  const double load = model.load();
  const auto f = [load, rho](double p) {
    return std::exp(p * load) * (1.0 - p * load) - rho * p * p;
  };
  return bisect(f, 0.0, 1.0 / load);
}

double team_utility(double p, double rho, const ContentionModel& model) {
  return model.lambda * utility(p, p, rho, model);
}

PoAReport poa(double rho, const ContentionModel& model) {
  require_positive_price(rho);
  model.validate();
  if (!(model.load() > 1.0)) {
    throw DomainError("delay poa: requires lambda C > 1");
  }
  const double a = model.half_load();
  const double load = model.load();
  const DelayThresholds th = thresholds(model);

  PoAReport report;
  report.team_map = team_optimizer(rho, model);
  report.team_optimum = team_utility(report.team_map, rho, model);

  const std::vector<Equilibrium> eqs = sne_all(rho, model);
  const auto worst = std::min_element(eqs.begin(), eqs.end(), [](const auto& x, const auto& y) {
    return x.utility_at_eq < y.utility_at_eq;
  });
  report.worst_equilibrium_map = worst->p_star;
  report.worst_equilibrium = model.lambda * worst->utility_at_eq;
  report.ratio = report.team_optimum / report.worst_equilibrium;

  // PoA = p_m a (2 - p_m lambda C) / (2 (-W) (1 - p_m lambda C)) for interior
  // equilibria; the window bounds evaluate it at -W = 1 (rho_t) and -W = a (rho_-1).
  const auto chain = [a, load](double p_m, double minus_w) {
    const double x = p_m * load;
    return p_m * a * (2.0 - x) / (2.0 * minus_w * (1.0 - x));
  };

  const double value = *report.ratio;
  if (th.regime == ContentionRegime::Large && rho >= th.rho_t && rho <= th.rho_boundary) {
    const double pm_t = team_optimizer(th.rho_t, model);
    const double pm_1 = team_optimizer(th.rho_boundary, model);
    report.bounds = PoABounds{chain(pm_1, a), chain(pm_t, 1.0)};

    const double x1 = pm_1 * load;
    const double literal_lower = pm_1 * model.lambda * (2.0 - x1) / (2.0 * (1.0 - x1));
    report.literal_bounds = PoABounds{literal_lower, report.bounds->upper};
    report.literal_bounds_discrepancy =
        std::abs(literal_lower - report.bounds->lower) >
        1e-12 * std::max(1.0, std::abs(report.bounds->lower));
  } else if (worst->branch == EquilibriumKind::LambertPrincipal) {
    report.bounds = PoABounds{report.team_map / worst->p_star, 1.0};
  }

  if (report.bounds) {
    constexpr double kRel = 1e-12;
    report.bounds_hold = value >= report.bounds->lower * (1.0 - kRel) &&
                         value <= report.bounds->upper * (1.0 + kRel);
  }
  return report;
}

}  // namespace sag::delay
