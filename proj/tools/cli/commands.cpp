#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "sag/delay_game.hpp"
#include "sag/errors.hpp"
#include "sag/goodput_game.hpp"
#include "sag/monte_carlo.hpp"
#include "sag_cli.hpp"

namespace sag::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Resolved {
  ContentionModel model;
  std::optional<NetworkParams> geometry;
};

bool has_geometry_flags(const Options& o) {
  return o.r || o.T || o.beta || o.A || o.mu || o.P || o.w;
}

double require(const std::optional<double>& v, const char* flag) {
  if (!v) {
    throw UsageError(std::string(flag) + " is required");
  }
  return *v;
}

Metric metric_of(const Options& o) {
  return o.metric == "delay" ? Metric::PotentialDelay : Metric::Goodput;
}

// Resolves (lambda, C) from the flags and writes the self-describing part of
// the parameter echo.
Resolved resolve_model(const Options& o, Json& echo, bool geometry_required) {
  Resolved out;
  const double lambda = require(o.lambda, "--lambda");
  echo["lambda"] = lambda;
  if (o.C) {
    if (geometry_required) {
      throw UsageError("simulate needs the physical geometry; --C is not accepted");
    }
    if (has_geometry_flags(o)) {
      throw UsageError("--C replaces the geometry flags --r --T --beta --A --mu --P --w");
    }
    out.model = {lambda, *o.C};
    out.model.validate();
    echo["C_source"] = "override";
  } else {
    NetworkParams g;
    g.lambda = lambda;
    g.r = o.r.value_or(g.r);
    g.T = o.T.value_or(g.T);
    g.beta = o.beta.value_or(g.beta);
    g.A = o.A.value_or(g.A);
    g.mu = o.mu.value_or(g.mu);
    g.P = o.P.value_or(g.P);
    g.w = o.w.value_or(g.w);
    g.validate();
    const ModelConstants k = contention_constant(g);
    out.model = {lambda, k.C};
    out.geometry = g;
    echo["C_source"] = "geometry";
    echo["r"] = g.r;
    echo["T"] = g.T;
    echo["beta"] = g.beta;
    echo["A"] = g.A;
    echo["mu"] = g.mu;
    echo["P"] = g.P;
    echo["w"] = g.w;
    echo["K_beta"] = k.K_beta;
  }
  const ContentionModel& m = out.model;
  echo["C"] = m.C;
  echo["C_bar"] = m.C_bar();
  echo["lambda_C"] = m.load();
  echo["lambda_C_bar"] = m.half_load();
  echo["load_regime"] = m.load() > 1.0 ? "lambda_C_above_1" : "lambda_C_at_most_1";
  echo["contention_regime"] = delay::to_string(delay::thresholds(m).regime);
  return out;
}

RunReport start(const char* command) {
  RunReport r;
  r.command = command;
  return r;
}

Cell num(double x) { return Cell{x}; }

// Worst equilibrium (lowest utility) of the delay game at rho.
Equilibrium worst_delay_equilibrium(double rho, const ContentionModel& m) {
  const auto eqs = delay::sne_all(rho, m);
  return *std::min_element(eqs.begin(), eqs.end(), [](const auto& a, const auto& b) {
    return a.utility_at_eq < b.utility_at_eq;
  });
}

double parse_window(const std::string& text) {
  double radius = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), radius);
  if (ec != std::errc() || end != text.data() + text.size() || !(radius > 0.0) ||
      !std::isfinite(radius)) {
    throw UsageError("--window must be 'auto' or a positive radius, got '" + text + "'");
  }
  return radius;
}

}  // namespace

RunReport cmd_sne(const Options& o) {
  RunReport rep = start("sne");
  const Resolved res = resolve_model(o, rep.params, false);
  const ContentionModel& m = res.model;
  const double rho = require(o.rho, "--rho");
  GameConfig{rho, metric_of(o)}.validate();
  rep.params["metric"] = o.metric;
  rep.params["rho"] = rho;

  std::vector<Equilibrium> eqs;
  if (metric_of(o) == Metric::Goodput) {
    eqs.push_back(goodput::sne(rho, m));
    rep.params["sne_regime"] = to_string(eqs.front().branch);
  } else {
    eqs = delay::sne_all(rho, m);
    rep.params["sne_regime"] = delay::regime_label(rho, m);
  }

  rep.table.columns = {"p_star", "branch", "stable", "utility", "goodput", "delay"};
  for (const Equilibrium& eq : eqs) {
    const double g = goodput_typical(eq.p_star, m);
    rep.table.rows.push_back({num(eq.p_star), std::string(to_string(eq.branch)), eq.stable,
                              num(eq.utility_at_eq), num(g), num(g > 0.0 ? 1.0 / g : kInf)});
  }
  rep.results["count"] = static_cast<long long>(eqs.size());
  return rep;
}

RunReport cmd_price_opt(const Options& o) {
  RunReport rep = start("price-opt");
  const Resolved res = resolve_model(o, rep.params, false);
  const ContentionModel& m = res.model;
  rep.params["metric"] = o.metric;

  const TeamDensities team = team_densities(m);
  double rho_star = 0.0;
  double p_star = 0.0;
  double eq_density = 0.0;
  double team_density = 0.0;
  if (metric_of(o) == Metric::Goodput) {
    rho_star = goodput::optimal_price(m);
    p_star = goodput::sne(rho_star, m).p_star;
    eq_density = m.lambda * goodput::equilibrium_goodput(rho_star, m);
    team_density = team.success;
    rep.results["density"] = "success";
  } else {
    const delay::DelayOptimum opt = delay::optimal_price(m);
    rho_star = opt.rho_star;
    p_star = opt.p_star;
    eq_density = opt.d_t_eq;
    team_density = team.delay;
    rep.results["density"] = "delay";
    if (m.half_load() > 1.0) {
      rep.results["bad_equilibrium_penalty"] = delay::bad_equilibrium_penalty(m);
    }
  }
  const double difference = std::abs(eq_density - team_density);
  if (!(difference <= 1e-12 * std::max(1.0, team_density))) {
    rep.warnings.push_back("equilibrium density differs from the team optimum by " +
                           format_number(difference));
  }
  rep.table.columns = {"rho_star", "p_star", "team_map", "equilibrium_density", "team_density",
                       "difference"};
  rep.table.rows.push_back({num(rho_star), num(p_star), num(team_optimal_map(m)),
                            num(eq_density), num(team_density), num(difference)});
  return rep;
}

RunReport cmd_poa_sweep(const Options& o) {
  RunReport rep = start("poa-sweep");
  const Resolved res = resolve_model(o, rep.params, false);
  const ContentionModel& m = res.model;
  const double lo = require(o.rho_min, "--rho-min");
  const double hi = require(o.rho_max, "--rho-max");
  if (o.steps < 1) {
    throw UsageError("--steps must be at least 1");
  }
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw UsageError("empty price range: need --rho-min <= --rho-max");
  }
  if (o.steps > 1 && !(lo < hi)) {
    throw UsageError("empty price range: --rho-min equals --rho-max with several steps");
  }
  rep.params["metric"] = o.metric;
  rep.params["rho_min"] = lo;
  rep.params["rho_max"] = hi;
  rep.params["steps"] = o.steps;

  const bool is_delay = metric_of(o) == Metric::PotentialDelay;
  rep.table.columns = {"rho",   "poa",    "lower_bound", "upper_bound", "bounds_hold",
                       "p_star", "p_m",   "worst_branch", "regime"};

  std::vector<double> rhos(static_cast<std::size_t>(o.steps));
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    rhos[i] = rhos.size() == 1 || i + 1 == rhos.size()
                  ? (i == 0 ? lo : hi)
                  : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(rhos.size() - 1);
  }

  bool all_hold = true;
  bool literal_discrepancy = false;
  std::optional<double> first_infinite;
  std::vector<EquilibriumKind> kinds;
  std::vector<double> values;
  for (const double rho : rhos) {
    PoAReport poa;
    EquilibriumKind kind{};
    std::string regime;
    if (is_delay) {
      poa = delay::poa(rho, m);
      kind = worst_delay_equilibrium(rho, m).branch;
      regime = delay::regime_label(rho, m);
      literal_discrepancy = literal_discrepancy || poa.literal_bounds_discrepancy;
    } else {
      poa = goodput::poa(rho, m);
      kind = goodput::sne(rho, m).branch;
      regime = to_string(kind);
    }
    all_hold = all_hold && poa.bounds_hold;
    if (poa.infinite() && !first_infinite) {
      first_infinite = rho;
    }
    kinds.push_back(kind);
    values.push_back(poa.ratio.value_or(kInf));

    Cell lower = std::monostate{};
    Cell upper = std::monostate{};
    Cell hold = std::monostate{};
    if (poa.bounds) {
      lower = poa.bounds->lower;
      upper = poa.bounds->upper;
      hold = poa.bounds_hold;
    }
    rep.table.rows.push_back({num(rho), num(poa.ratio.value_or(kInf)), lower, upper, hold,
                              num(poa.worst_equilibrium_map), num(poa.team_map),
                              std::string(to_string(kind)), regime});
  }

  rep.results["bounds_hold_everywhere"] = all_hold;
  if (is_delay) {
    const delay::DelayThresholds th = delay::thresholds(m);
    rep.results["rho_t"] = th.rho_t;
    rep.results["rho_boundary"] = th.rho_boundary;
    Json jumps = Json::array();
    for (std::size_t i = 1; i < kinds.size(); ++i) {
      if (kinds[i] == kinds[i - 1]) {
        continue;
      }
      const double left = rhos[i - 1];
      const double right = rhos[i];
      Json jump = Json::object();
      jump["rho_left"] = left;
      jump["rho_right"] = right;
      if (th.rho_boundary >= left && th.rho_boundary <= right) {
        jump["rho"] = th.rho_boundary;
      } else if (th.rho_t >= left && th.rho_t <= right) {
        jump["rho"] = th.rho_t;
      }
      jump["poa_left"] = values[i - 1];
      jump["poa_right"] = values[i];
      jump["from"] = to_string(kinds[i - 1]);
      jump["to"] = to_string(kinds[i]);
      jumps.push_back(std::move(jump));
    }
    rep.results["discontinuities"] = std::move(jumps);
    if (literal_discrepancy) {
      rep.warnings.push_back(
          "the literal lower bound p_m lambda (2 - x) / (2 (1 - x)) differs from the bound "
          "derived from the PoA expression because lambda != 1; rows report the derived bound");
    }
  } else {
    rep.results["infinite_from_rho"] = std::exp(-m.load());
    rep.results["first_infinite_row_rho"] =
        first_infinite ? Json(*first_infinite) : Json(nullptr);
  }
  return rep;
}

RunReport cmd_replicator(const Options& o) {
  RunReport rep = start("replicator");
  if (metric_of(o) != Metric::Goodput) {
    throw UsageError("replicator dynamics are defined for the goodput game only");
  }
  const Resolved res = resolve_model(o, rep.params, false);
  const ContentionModel& m = res.model;
  const double p0 = require(o.p0, "--p0");
  const double rho = require(o.rho, "--rho");
  rep.params["metric"] = o.metric;
  rep.params["p0"] = p0;
  rep.params["rho"] = rho;
  rep.params["horizon"] = o.horizon;
  rep.params["step"] = o.step;

  const Trajectory traj = goodput::replicator_trajectory(p0, rho, m, o.horizon, o.step);
  const Equilibrium eq = goodput::sne(rho, m);
  rep.params["sne_regime"] = to_string(eq.branch);

  rep.results["p_star"] = eq.p_star;
  rep.results["final_state"] = traj.states.back();
  rep.results["terminal_gap"] = traj.terminal_gap;
  rep.results["converged"] = traj.converged;
  rep.table.columns = {"t", "p"};
  rep.table.rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    rep.table.rows.push_back({num(traj.times[i]), num(traj.states[i])});
  }
  if (!traj.converged) {
    rep.warnings.push_back("trajectory ended " + format_number(traj.terminal_gap) +
                           " away from the equilibrium; try a longer --horizon");
  }
  return rep;
}

RunReport cmd_simulate(const Options& o) {
  RunReport rep = start("simulate");
  const Resolved res = resolve_model(o, rep.params, true);
  const NetworkParams& g = *res.geometry;
  const double p = require(o.p, "--p");
  if (!(p > 0.0 && p <= 1.0)) {
    throw UsageError("--p must lie in (0, 1] for simulate");
  }
  const long long n = o.n.value_or(o.quantity == "local-delay" ? 10000 : 100000);
  if (n < 1) {
    throw UsageError("--n must be at least 1");
  }
  if (o.max_slots < 1) {
    throw UsageError("--max-slots must be at least 1");
  }

  mc::SimConfig sim;
  sim.n_samples = static_cast<std::uint64_t>(n);
  sim.seed = o.seed.value_or(0);
  sim.max_slots = static_cast<std::uint64_t>(o.max_slots);
  sim.threads = o.threads;
  if (o.window != "auto") {
    sim.window_radius = parse_window(o.window);
  }

  rep.params["quantity"] = o.quantity;
  rep.params["p"] = p;
  rep.params["n"] = n;
  rep.params["seed"] = static_cast<long long>(sim.seed);
  if (o.quantity == "local-delay") {
    rep.params["max_slots"] = o.max_slots;
  }
  rep.params["window"] = o.window;

  mc::SimEstimate est;
  double closed_form = 0.0;
  std::vector<std::string> columns = {"estimate", "std_error", "closed_form", "z"};
  std::vector<Cell> extra;
  if (o.quantity == "local-delay") {
    const mc::LocalDelayEstimate ld = mc::estimate_local_delay(g, p, sim);
    est = ld.estimate;
    const double success = goodput_typical(p, g);
    closed_form = 1.0 / success;
    const mc::GoodnessOfFit fit = mc::geometric_fit(ld, success);
    columns.insert(columns.end(), {"censored_fraction", "chi_square", "degrees_of_freedom",
                                   "gof_p_value"});
    extra = {num(est.censored_fraction), num(fit.statistic),
             static_cast<long long>(fit.degrees_of_freedom), num(fit.p_value)};
  } else {
    est = mc::estimate_coverage(g, p, sim);
    closed_form = goodput_tagged(1.0, p, g);
  }

  double z = 0.0;
  if (est.std_error > 0.0) {
    z = (est.value - closed_form) / est.std_error;
  } else if (est.value != closed_form) {
    z = est.value > closed_form ? kInf : -kInf;
  }
  columns.insert(columns.end(), {"n", "seed", "window_radius", "far_field_factor"});
  std::vector<Cell> row = {num(est.value), num(est.std_error), num(closed_form), num(z)};
  row.insert(row.end(), extra.begin(), extra.end());
  row.insert(row.end(), {static_cast<long long>(est.n), static_cast<long long>(est.seed),
                         num(est.window_radius), num(est.far_field_factor)});
  rep.table.columns = std::move(columns);
  rep.table.rows.push_back(std::move(row));

  rep.results["within_3_se"] = std::abs(z) <= 3.0;
  rep.warnings = est.warnings;
  rep.exit_code = std::abs(z) <= 3.0 ? kExitOk : kExitCheckFailed;
  return rep;
}

RunReport execute(const Options& o) {
  if (o.command == "sne") return cmd_sne(o);
  if (o.command == "price-opt") return cmd_price_opt(o);
  if (o.command == "poa-sweep") return cmd_poa_sweep(o);
  if (o.command == "replicator") return cmd_replicator(o);
  if (o.command == "simulate") return cmd_simulate(o);
  throw UsageError("unknown command '" + o.command + "'");
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  RunReport rep;
  Options opts;
  try {
    opts = parse_args(argv);
    rep = execute(opts);
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {  // ParameterError
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {  // DomainError
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string text = opts.output == "csv" ? render_csv(rep) : render_json(rep);
  if (opts.out.empty()) {
    out << text;
  } else {
    std::ofstream file(opts.out, std::ios::binary);
    if (!(file << text)) {
      err << "error: cannot write '" << opts.out << "'\n";
      return kExitUsage;
    }
  }
  for (const auto& w : rep.warnings) {
    err << "warning: " << w << '\n';
  }
  return rep.exit_code;
}

}  // namespace sag::cli
