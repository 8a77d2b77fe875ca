#include "sag/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "sag/errors.hpp"
#include "sag/philox.hpp"

namespace sag::mc {

namespace {

constexpr double kPi = std::numbers::pi;

struct LinkGeometry {
  double density = 0.0;       // p lambda
  double window_sq = 0.0;     // R^2
  double far_factor = 1.0;    // P(far field lets the link through)
  double signal_scale = 0.0;  // P l(r) / T
  double noise = 0.0;
  double inv_mu = 1.0;
  double power = 1.0;
  double a_sq = 1.0;
  double half_beta = 2.0;
};

LinkGeometry make_geometry(const NetworkParams& params, double p, double window, bool far_field) {
  LinkGeometry g;
  g.density = p * params.lambda;
  g.window_sq = window * window;
  if (far_field && g.density > 0.0) {
    g.far_factor = std::exp(-2.0 * kPi * g.density * contention_integral(params, window));
  }
  g.signal_scale = params.P * params.attenuation(params.r) / params.T;
  g.noise = params.w;
  g.inv_mu = 1.0 / params.mu;
  g.power = params.P;
  g.a_sq = params.A * params.A;
  g.half_beta = 0.5 * params.beta;
  return g;
}

// One Palm snapshot. Draw order is fixed (far field, tagged fading, then
// (gap, fading) pairs outward) so runs with different windows share the
// randomness of the common region.
bool covered(const LinkGeometry& g, CounterRng& rng) {
  const double u_far = rng.uniform();
  if (u_far >= g.far_factor) {
    return false;
  }
  const double budget = g.signal_scale * rng.exponential() * g.inv_mu - g.noise;
  if (budget <= 0.0) {
    return false;
  }
  if (g.density == 0.0) {
    return true;
  }
  const double area_rate = 1.0 / (kPi * g.density);
  double arrival = 0.0;
  double interference = 0.0;
  for (;;) {
    arrival += rng.exponential();
    const double dist_sq = arrival * area_rate;
    if (dist_sq > g.window_sq) {
      return true;
    }
    interference += g.power * rng.exponential() * g.inv_mu * std::pow(g.a_sq * dist_sq, -g.half_beta);
    if (interference >= budget) {
      return false;
    }
  }
}

template <class Body>
void parallel_for(std::uint64_t n, unsigned threads, Body&& body) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n / 256 + 1));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::uint64_t begin = t * chunk;
    const std::uint64_t end = std::min(n, begin + chunk);
    pool.emplace_back([begin, end, &body] {
      for (std::uint64_t i = begin; i < end; ++i) {
        body(i);
      }
    });
  }
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 64) {
    double s = 0.0;
    for (double x : xs) {
      s += x;
    }
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

void summarize(std::vector<double>& samples, SimEstimate& est) {
  const auto n = static_cast<double>(samples.size());
  est.n = samples.size();
  est.value = pairwise_sum(samples) / n;
  if (samples.size() < 2) {
    est.std_error = 0.0;
    return;
  }
  for (double& x : samples) {
    x = (x - est.value) * (x - est.value);
  }
  est.std_error = std::sqrt(pairwise_sum(samples) / (n - 1.0) / n);
}

SimEstimate run_coverage(const NetworkParams& params, double p, const SimConfig& sim) {
  SimEstimate est;
  est.seed = sim.seed;
  est.window_radius = resolve_window(params, p, sim);
  const LinkGeometry g = make_geometry(params, p, est.window_radius, sim.far_field);
  est.far_field_factor = g.far_factor;

  std::vector<double> hits(sim.n_samples);
  parallel_for(sim.n_samples, sim.threads, [&](std::uint64_t i) {
    CounterRng rng(sim.seed, i, 0);
    hits[i] = covered(g, rng) ? 1.0 : 0.0;
  });
  summarize(hits, est);
  return est;
}

}  // namespace

void SimConfig::validate() const {
  if (n_samples < 1) {
    throw ParameterError("n_samples must be at least 1");
  }
  if (max_slots < 1) {
    throw ParameterError("max_slots must be at least 1");
  }
  if (window_radius && !(*window_radius > 0.0 && std::isfinite(*window_radius))) {
    throw ParameterError("window radius must be positive");
  }
  if (!(bias_tol > 0.0 && bias_tol < 1.0)) {
    throw ParameterError("bias_tol must lie in (0, 1)");
  }
}

double truncation_radius(const NetworkParams& params, double p, double bias_tol) {
  params.validate();
  require_probability(p, "p");
  if (!(bias_tol > 0.0 && bias_tol < 1.0)) {
    throw ParameterError("bias_tol must lie in (0, 1)");
  }
  if (p == 0.0) {
    return 10.0 * params.r;
  }
  const double beta = params.beta;
  const double budget = -std::log1p(-bias_tol);
  const double scale = 2.0 * kPi * p * params.lambda * params.T * std::pow(params.r, beta) /
                       ((beta - 2.0) * budget);
  return std::max(params.r, std::pow(scale, 1.0 / (beta - 2.0)));
}

double resolve_window(const NetworkParams& params, double p, const SimConfig& sim) {
  if (sim.window_radius) {
    return *sim.window_radius;
  }
  const double radius = truncation_radius(params, p, sim.bias_tol);
  if (!sim.far_field || p == 0.0) {
    return radius;
  }
  const double capped = std::sqrt(kMaxMeanInterferers / (kPi * p * params.lambda));
  return std::min(radius, std::max(capped, params.r));
}

SimEstimate estimate_coverage(const NetworkParams& params, double p, const SimConfig& sim) {
  params.validate();
  sim.validate();
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("estimate_coverage: p must lie in (0, 1]");
  }
  return run_coverage(params, p, sim);
}

SimEstimate estimate_tagged_goodput(double p_tag, double p, const NetworkParams& params,
                                    const SimConfig& sim) {
  params.validate();
  sim.validate();
  require_probability(p_tag, "p_tag");
  require_probability(p, "p");
  SimEstimate est = run_coverage(params, p, sim);
  est.value *= p_tag;
  est.std_error *= p_tag;
  return est;
}

LocalDelayEstimate estimate_local_delay(const NetworkParams& params, double p,
                                        const SimConfig& sim) {
  params.validate();
  sim.validate();
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("estimate_local_delay: p must lie in (0, 1]");
  }
  LocalDelayEstimate out;
  SimEstimate& est = out.estimate;
  est.seed = sim.seed;
  est.window_radius = resolve_window(params, p, sim);
  const LinkGeometry g = make_geometry(params, p, est.window_radius, sim.far_field);
  est.far_field_factor = g.far_factor;

  const std::uint64_t max_slots = sim.max_slots;
  std::vector<double> slots(sim.n_samples);
  parallel_for(sim.n_samples, sim.threads, [&](std::uint64_t i) {
    std::uint64_t k = 1;
    for (; k <= max_slots; ++k) {
      CounterRng rng(sim.seed, i, static_cast<std::uint32_t>(k));
      if (rng.uniform() < p && covered(g, rng)) {
        break;
      }
    }
    slots[i] = static_cast<double>(k);  // max_slots + 1 marks a censored run
  });

  out.slot_counts.assign(max_slots + 1, 0);
  for (double& s : slots) {
    const auto k = static_cast<std::uint64_t>(s);
    if (k > max_slots) {
      ++out.censored;
      s = static_cast<double>(max_slots);
    } else {
      ++out.slot_counts[k];
    }
  }
  summarize(slots, est);
  est.censored_fraction = static_cast<double>(out.censored) / static_cast<double>(sim.n_samples);
  if (est.censored_fraction > 0.01) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "CensoringWarning: %.3g%% of runs reached max_slots = %llu",
                  100.0 * est.censored_fraction, static_cast<unsigned long long>(max_slots));
    est.warnings.emplace_back(buf);
  }
  return out;
}

GoodnessOfFit geometric_fit(const LocalDelayEstimate& delay, double success_prob) {
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw DomainError("geometric_fit: success probability must lie in (0, 1]");
  }
  const double n = static_cast<double>(delay.estimate.n);
  const std::size_t max_slots = delay.slot_counts.size() - 1;

  double statistic = 0.0;
  int cells = 0;
  double observed = 0.0;
  double expected = 0.0;
  double survival = 1.0;  // P(K > k - 1)
  std::size_t k = 1;
  for (; k <= max_slots; ++k) {
    const double pk = survival * success_prob;
    // Close a cell once it expects 5 runs and the remaining tail does too.
    observed += static_cast<double>(delay.slot_counts[k]);
    expected += n * pk;
    survival -= pk;
    if (expected >= 5.0 && n * survival >= 5.0) {
      statistic += (observed - expected) * (observed - expected) / expected;
      ++cells;
      observed = 0.0;
      expected = 0.0;
    } else if (n * survival < 5.0) {
      ++k;
      break;
    }
  }
  // Tail cell: everything not yet binned, censored runs included.
  for (; k <= max_slots; ++k) {
    observed += static_cast<double>(delay.slot_counts[k]);
  }
  observed += static_cast<double>(delay.censored);
  expected += n * std::max(survival, 0.0);
  if (expected > 0.0) {
    statistic += (observed - expected) * (observed - expected) / expected;
    ++cells;
  }

  GoodnessOfFit fit;
  fit.statistic = statistic;
  fit.degrees_of_freedom = std::max(1, cells - 1);
  const boost::math::chi_squared_distribution<double> dist(fit.degrees_of_freedom);
  fit.p_value = boost::math::cdf(boost::math::complement(dist, statistic));
  return fit;
}

}  // namespace sag::mc
