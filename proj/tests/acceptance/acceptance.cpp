// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "sag/delay_game.hpp"
#include "sag/goodput_game.hpp"
#include "sag/lambert_w.hpp"
#include "sag/monte_carlo.hpp"
#include "sag/spatial_model.hpp"
#include "sag_cli.hpp"

namespace {

using namespace sag;
using Clock = std::chrono::steady_clock;

constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. Monte Carlo coverage within 3 SE of e^{-p lambda C} on 20 random sets, <= 120 s.
Outcome coverage_vs_closed_form() {
  oracle::Sampler s(20240601);
  const auto start = Clock::now();
  int within = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    NetworkParams params;
    params.lambda = s.uniform(0.05, 1.0);
    params.r = s.uniform(0.5, 2.0);
    params.beta = s.uniform(2.5, 5.0);
    params.T = s.uniform(0.1, 10.0);
    params.w = 0.0;
    const double p = s.uniform(0.1, 1.0);
    mc::SimConfig sim;
    sim.n_samples = 100000;
    sim.seed = 1000 + static_cast<std::uint64_t>(i);
    const mc::SimEstimate est = mc::estimate_coverage(params, p, sim);
    const double closed = std::exp(-p * params.lambda * contention_constant(params).C);
    double se = est.std_error;
    if (se == 0.0) {
      // all-miss or all-hit sample: use the binomial SE at the hypothesised value
      se = std::sqrt(closed * (1.0 - closed) / static_cast<double>(est.n));
    }
    const double z = se > 0.0 ? (est.value - closed) / se : (est.value == closed ? 0.0 : 1e300);
    worst_z = std::max(worst_z, std::abs(z));
    within += std::abs(z) <= 3.0 ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  return {within == 20 && elapsed <= 120.0,
          fmt("%d/20 within 3 SE, max |z| = %.3f, %.1f s (limit 120 s)", within, worst_z, elapsed)};
}

// 2. Quadrature route equals the closed form within 1e-8 relative on 100 points, <= 1 s.
Outcome integral_vs_closed_form() {
  oracle::Sampler s(77);
  const auto start = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    NetworkParams params;
    params.lambda = s.uniform(0.05, 1.0);
    params.r = s.uniform(0.5, 2.0);
    params.beta = s.uniform(2.5, 5.0);
    params.T = s.uniform(0.1, 10.0);
    params.A = s.uniform(0.5, 2.0);
    params.mu = s.uniform(0.5, 2.0);
    params.P = s.uniform(0.5, 2.0);
    params.w = s.uniform(0.0, 0.1);
    const double p = s.uniform(0.01, 1.0);
    const double closed = goodput_typical(p, params);
    worst = std::max(worst, std::abs(goodput_integral(p, params) - closed) / closed);
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && elapsed <= 1.0,
          fmt("max relative gap %.3g (limit 1e-8), %.3f s (limit 1 s)", worst, elapsed)};
}

// 3. Team MAP vs 1e5-point grid argmax within 1e-4 on 100 (lambda, C); d_t d_s = lambda^2.
Outcome team_optimum() {
  oracle::Sampler s(33);
  double worst_map = 0.0;
  double worst_product = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ContentionModel m{s.log_uniform(0.05, 5.0), s.log_uniform(0.05, 20.0)};
    const auto grid = oracle::grid_max(
        [&](double p) { return m.lambda * p * std::exp(-p * m.load()); }, 0.0, 1.0, 100000);
    worst_map = std::max(worst_map, std::abs(team_optimal_map(m) - grid.argmax));
    const TeamDensities d = team_densities(m);
    const double l2 = m.lambda * m.lambda;
    worst_product = std::max(worst_product, std::abs(d.success * d.delay - l2) / l2);
  }
  return {worst_map <= 1e-4 && worst_product <= 1e-15,
          fmt("max |p_m - grid argmax| = %.3g (limit 1e-4), max |d_t d_s - lambda^2| / lambda^2 = "
              "%.3g (limit 1e-15)",
              worst_map, worst_product)};
}

// 4. Goodput pricing: equilibrium density of success equals the team optimum.
Outcome goodput_pricing() {
  std::ostringstream detail;
  bool pass = true;
  for (const auto& [C, expected_rho] : {std::pair{3.0, 1.0 / kE}, std::pair{0.5, std::exp(-0.5)}}) {
    const ContentionModel m{1.0, C};
    const double rho = goodput::optimal_price(m);
    const double eq = m.lambda * goodput::equilibrium_goodput(rho, m);
    const auto grid = oracle::grid_max(
        [&](double p) { return m.lambda * p * std::exp(-p * m.load()); }, 0.0, 1.0, 100001);
    const double team = team_densities(m).success;
    const bool ok = std::abs(rho - expected_rho) <= 1e-15 && std::abs(eq - team) <= 1e-12 &&
                    std::abs(team - grid.max) <= 1e-9;
    pass = pass && ok;
    detail << fmt("C=%g: rho*=%.12f eq=%.12f team=%.12f grid=%.12f; ", C, rho, eq, team, grid.max);
  }
  pass = pass && std::abs(team_densities(ContentionModel{1.0, 3.0}).success - 0.122626) <= 1e-6;
  return {pass, detail.str()};
}

// 5. No unilateral deviation on a 1e4 grid improves the goodput SNE by more than 1e-9.
Outcome goodput_sne_no_deviation() {
  oracle::Sampler s(55);
  double worst = -1e300;
  for (int i = 0; i < 200; ++i) {
    const ContentionModel m{s.log_uniform(0.05, 5.0), s.log_uniform(0.05, 20.0)};
    const double rho = s.uniform(0.0, 1.5);
    const Equilibrium eq = goodput::sne(rho, m);
    const auto grid = oracle::grid_max(
        [&](double q) { return goodput::utility(q, eq.p_star, rho, m); }, 0.0, 1.0, 10000);
    worst = std::max(worst, grid.max - eq.utility_at_eq);
  }
  return {worst <= 1e-9, fmt("max deviation gain %.3g (limit 1e-9) over 200 cases", worst)};
}

// 6. Delay-game two-SNE window and the equilibria at rho = 18.
Outcome delay_structure() {
  const ContentionModel m{1.0, 3.0};
  const double a = 1.5;
  const delay::DelayThresholds th = delay::thresholds(m);
  const double rho_t = (a * kE) * (a * kE);
  const double rho_1 = std::exp(3.0);
  bool pass = std::abs(th.rho_t - rho_t) <= 1e-9 && std::abs(th.rho_boundary - rho_1) <= 1e-9;
  pass = pass && std::abs(th.rho_t - 16.6254) <= 1e-4 && std::abs(th.rho_boundary - 20.0855) <= 1e-4;

  const auto count = [&](double rho) { return delay::sne_all(rho, m).size(); };
  pass = pass && count(rho_t - 1e-9) == 1 && count(rho_t + 1e-9) == 2 &&
         count(rho_1 - 1e-9) == 2 && count(rho_1 + 1e-9) == 1;

  const auto eqs = delay::sne_all(18.0, m);
  if (eqs.size() != 2) {
    return {false, fmt("expected 2 equilibria at rho = 18, got %zu", eqs.size())};
  }
  const auto residual = [&](double p) { return std::abs(p - std::exp(a * p) / std::sqrt(18.0)); };
  const auto f = [&](long double p) { return p - std::exp(a * p) / std::sqrt(18.0L); };
  const double low = static_cast<double>(oracle::bisect(f, 0.0L, 1.0L / a));
  const double high = static_cast<double>(oracle::bisect(f, 1.0L / a, 1.0L));
  const double r0 = residual(eqs[0].p_star);
  const double r1 = residual(eqs[1].p_star);
  pass = pass && r0 <= 1e-10 && r1 <= 1e-10 && std::abs(eqs[0].p_star - low) <= 1e-10 &&
         std::abs(eqs[1].p_star - high) <= 1e-10 && std::abs(eqs[0].p_star - 0.4960) <= 1e-4 &&
         std::abs(eqs[1].p_star - 0.8727) <= 1e-4 && eqs[0].stable && !eqs[1].stable &&
         eqs[0].branch == EquilibriumKind::LambertPrincipal &&
         eqs[1].branch == EquilibriumKind::LambertMinus1;
  return {pass, fmt("window (%.10f, %.10f); rho=18: %.6f (W0, %s) %.6f (W-1, %s), residuals "
                    "%.2g %.2g (limit 1e-10)",
                    th.rho_t, th.rho_boundary, eqs[0].p_star, eqs[0].stable ? "stable" : "unstable",
                    eqs[1].p_star, eqs[1].stable ? "stable" : "unstable", r0, r1)};
}

// 7. Delay pricing: equilibrium delay density equals the team optimum.
Outcome delay_pricing() {
  const ContentionModel heavy{1.0, 3.0};
  const delay::DelayOptimum h = delay::optimal_price(heavy);
  const ContentionModel light{1.0, 0.5};
  const delay::DelayOptimum l = delay::optimal_price(light);
  const bool pass =
      std::abs(h.rho_star - 9.0 * kE) <= 1e-12 && std::abs(h.p_star - 1.0 / 3.0) <= 1e-12 &&
      std::abs(h.d_t_eq - 3.0 * kE) <= 1e-12 &&
      std::abs(h.d_t_eq - team_densities(heavy).delay) <= 1e-12 &&
      std::abs(h.rho_star - 24.4645) <= 1e-4 && std::abs(h.d_t_eq - 8.15485) <= 1e-5 &&
      std::abs(l.rho_star - std::exp(0.5)) <= 1e-12 && l.p_star == 1.0 &&
      std::abs(l.d_t_eq - std::exp(0.5)) <= 1e-12 &&
      std::abs(l.d_t_eq - team_densities(light).delay) <= 1e-12;
  return {pass, fmt("C=3: rho*=%.12f p*=%.15f d=%.12f team=%.12f; C=0.5: rho*=%.12f p*=%g d=%.12f",
                    h.rho_star, h.p_star, h.d_t_eq, team_densities(heavy).delay, l.rho_star,
                    l.p_star, l.d_t_eq)};
}

// 8. Bad-branch penalty is e/2 for every lambda C_bar > 1.
Outcome bad_branch_penalty() {
  oracle::Sampler s(88);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double lambda = s.log_uniform(0.05, 20.0);
    const double a = i == 0 ? 1.5 : 1.0 + s.log_uniform(1e-6, 50.0);
    const ContentionModel m{lambda, 2.0 * a / lambda};
    worst = std::max(worst, std::abs(delay::bad_equilibrium_penalty(m) - kE / 2.0));
  }
  return {worst <= 1e-12, fmt("max |ratio - e/2| = %.3g (limit 1e-12) over 200 models", worst)};
}

// 9. h on the principal branch falls then rises, turning at 4e (lambda C_bar)^2.
Outcome h_quasi_convexity() {
  const ContentionModel m{1.0, 3.0};
  const double a = m.half_load();
  const double lo = delay::thresholds(m).rho_t;
  const double hi = 10.0 * delay::optimal_price(m).rho_star;
  constexpr int kPoints = 1000;
  const double cell = (hi - lo) / (kPoints - 1);
  std::vector<double> h(kPoints);
  int argmin = 0;
  for (int i = 0; i < kPoints; ++i) {
    h[i] = delay::h_objective(lo + cell * i, Branch::Principal, m);
    if (h[i] < h[argmin]) argmin = i;
  }
  bool shape = true;
  for (int i = 1; i < kPoints; ++i) {
    shape = shape && (i <= argmin ? h[i] <= h[i - 1] : h[i] >= h[i - 1]);
  }
  const double turn = 4.0 * kE * a * a;
  const double found = lo + cell * argmin;
  return {shape && std::abs(found - turn) <= cell,
          fmt("monotone pieces: %s, grid minimum at %.6f vs %.6f (cell %.4f)",
              shape ? "yes" : "no", found, turn, cell)};
}

// 10. Goodput PoA infinite exactly from e^{-lambda C}; delay sweep jumps at e^3 with bounds held.
Outcome poa_behaviour() {
  bool goodput_ok = true;
  for (const ContentionModel& m :
       {ContentionModel{1.0, 3.0}, ContentionModel{1.0, 0.5}, ContentionModel{0.3, 2.0}}) {
    const double threshold = std::exp(-m.load());
    for (int i = 0; i <= 1000; ++i) {
      const double rho = 2.0 * i / 1000.0;
      goodput_ok = goodput_ok && goodput::poa(rho, m).infinite() == (rho >= threshold);
    }
    goodput_ok = goodput_ok && goodput::poa(threshold, m).infinite() &&
                 !goodput::poa(std::nextafter(threshold, 0.0), m).infinite();
  }

  cli::Options opts;
  opts.command = "poa-sweep";
  opts.metric = "delay";
  opts.lambda = 1.0;
  opts.C = 3.0;
  opts.rho_min = 16.7;
  opts.rho_max = 30.0;
  opts.steps = 200;
  const cli::RunReport sweep = cli::execute(opts);
  const auto& jumps = sweep.results["discontinuities"];
  const bool jump_ok = jumps.size() == 1 && jumps[0].contains("rho") &&
                       std::abs(jumps[0]["rho"].get<double>() - std::exp(3.0)) <= 1e-9;

  const ContentionModel m{1.0, 3.0};
  const delay::DelayThresholds th = delay::thresholds(m);
  bool bounds_ok = true;
  double prev = 2.0;
  bool decreasing = true;
  for (int i = 0; i < 1000; ++i) {
    const double rho = th.rho_t + (th.rho_boundary - th.rho_t) * i / 999.0;
    const PoAReport r = delay::poa(rho, m);
    bounds_ok = bounds_ok && r.bounds.has_value() && r.bounds_hold;
    decreasing = decreasing && *r.ratio <= prev;
    prev = *r.ratio;
  }
  return {goodput_ok && jump_ok && bounds_ok && decreasing,
          fmt("goodput infinite marker exact: %s; delay jump at %.10f (e^3 = %.10f); bounds on "
              "[rho_t, rho_-1]: %s; decreasing: %s",
              goodput_ok ? "yes" : "no",
              jumps.empty() ? std::nan("") : jumps[0].value("rho", std::nan("")), std::exp(3.0),
              bounds_ok ? "hold" : "violated", decreasing ? "yes" : "no")};
}

// 11. Replicator trajectories reach ln2/3 within 1e-6, each in <= 1 s.
Outcome replicator_convergence() {
  const ContentionModel m{1.0, 3.0};
  const double target = std::log(2.0) / 3.0;
  bool pass = std::abs(target - 0.231049) <= 1e-6;
  std::ostringstream detail;
  for (double p0 : {0.05, 0.5, 0.95}) {
    const auto start = Clock::now();
    const Trajectory t = goodput::replicator_trajectory(p0, 0.5, m);
    const double elapsed = seconds_since(start);
    const double gap = std::abs(t.states.back() - target);
    pass = pass && gap <= 1e-6 && elapsed <= 1.0;
    detail << fmt("p0=%.2f gap %.2g in %.3f s; ", p0, gap, elapsed);
  }
  return {pass, detail.str()};
}

// 12. Lambert W residual on 1e4-point grids of both branches; branch point exact.
Outcome lambert_kernel() {
  constexpr int kPoints = 10000;
  const double lo = -1.0 / kE + 1e-9;
  double worst0 = 0.0;
  double worstm = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = lo + (50.0 - lo) * i / (kPoints - 1);
    const double w = lambert_w(x);
    worst0 = std::max(worst0, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
    const double xm = lo + (-1e-9 - lo) * i / (kPoints - 1);
    const double wm = lambert_w(xm, Branch::Minus1);
    worstm = std::max(worstm, std::abs(wm * std::exp(wm) - xm) / std::max(1.0, std::abs(xm)));
  }
  const double b0 = std::abs(lambert_w(-1.0 / kE) + 1.0);
  const double bm = std::abs(lambert_w(-1.0 / kE, Branch::Minus1) + 1.0);
  return {worst0 <= 1e-12 && worstm <= 1e-12 && b0 <= 1e-8 && bm <= 1e-8,
          fmt("max scaled residual W0 %.3g, W-1 %.3g (limit 1e-12); |W(-1/e) + 1| = %.3g, %.3g "
              "(limit 1e-8)",
              worst0, worstm, b0, bm)};
}

// 13. Local delay within 3 SE of e^{p lambda C} / p and geometric at significance 0.01.
Outcome local_delay() {
  NetworkParams params;
  params.lambda = 0.2;
  const double p = 0.5;
  mc::SimConfig sim;
  sim.n_samples = 100000;
  sim.seed = 13;
  const mc::LocalDelayEstimate d = mc::estimate_local_delay(params, p, sim);
  const double C = contention_constant(params).C;
  const double closed = std::exp(p * params.lambda * C) / p;
  const double z = (d.estimate.value - closed) / d.estimate.std_error;
  const mc::GoodnessOfFit fit = mc::geometric_fit(d, 1.0 / closed);
  return {std::abs(z) <= 3.0 && fit.p_value >= 0.01 && std::abs(closed - 3.2763) <= 5e-4,
          fmt("mean %.5f vs %.5f, z = %.3f; chi-square %.2f on %d df, p-value %.3f (need >= 0.01)",
              d.estimate.value, closed, z, fit.statistic, fit.degrees_of_freedom, fit.p_value)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"closed-form coverage vs Monte Carlo", coverage_vs_closed_form},
      {"integral and closed-form goodput agree", integral_vs_closed_form},
      {"team optimum vs grid argmax", team_optimum},
      {"goodput pricing reaches the team optimum", goodput_pricing},
      {"goodput SNE admits no profitable deviation", goodput_sne_no_deviation},
      {"delay-game equilibrium structure", delay_structure},
      {"delay pricing reaches the team optimum", delay_pricing},
      {"bad-branch penalty is e/2", bad_branch_penalty},
      {"h is quasi-convex on the principal branch", h_quasi_convexity},
      {"price of anarchy behaviour", poa_behaviour},
      {"replicator convergence", replicator_convergence},
      {"Lambert W kernel accuracy", lambert_kernel},
      {"local delay is geometric with mean 1/g", local_delay},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", index, name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
