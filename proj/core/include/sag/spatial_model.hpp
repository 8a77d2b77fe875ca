#pragma once

/**
 * \file spatial_model.hpp
 * \brief Poisson bipolar network with slotted Aloha and Rayleigh fading.
 *
 * Transmitters form a planar Poisson process of intensity lambda, each with a
 * receiver at distance r. Attenuation is l(d) = (A d)^{-beta}, fading is
 * exponential with mean 1/mu, and reception succeeds when the SINR exceeds T.
 * Noise is deterministic (W = w).
 *
 * With these assumptions the goodput of a node transmitting with probability p
 * is g(p) = p exp(-p lambda C) exp(-mu T w / (P l(r))), where
 * C = 2 pi r^2 T^{2/beta} K(beta) is the contention constant.
 */

namespace sag {

struct NetworkParams {
  double lambda = 1.0;  ///< node intensity per unit area
  double r = 1.0;       ///< transmitter-receiver distance
  double beta = 4.0;    ///< path-loss exponent, > 2
  double T = 1.0;       ///< SINR threshold
  double A = 1.0;       ///< attenuation scale (inverse length)
  double mu = 1.0;      ///< fading rate
  double P = 1.0;       ///< transmit power
  double w = 0.0;       ///< deterministic noise power

  /// Throws DomainError naming the first violated constraint.
  void validate() const;

  /// l(d) = (A d)^{-beta}
  [[nodiscard]] double attenuation(double distance) const;
};

struct ModelConstants {
  double K_beta = 0.0;
  double C = 0.0;
  double C_bar = 0.0;
};

/// The two numbers every game quantity depends on: intensity and contention.
struct ContentionModel {
  double lambda = 1.0;
  double C = 1.0;

  static ContentionModel from(const NetworkParams& params);

  [[nodiscard]] double load() const noexcept { return lambda * C; }
  [[nodiscard]] double C_bar() const noexcept { return 0.5 * C; }
  /// lambda * C_bar, the constant that drives the delay game.
  [[nodiscard]] double half_load() const noexcept { return 0.5 * lambda * C; }

  void validate() const;
};

/// K(beta) = Gamma(2/beta) Gamma(1 - 2/beta) / beta = (pi/beta) / sin(2 pi / beta).
double spatial_contention(double beta);

ModelConstants contention_constant(const NetworkParams& params);

/// exp(-mu T w / (P l(r))), the deterministic-noise Laplace factor.
double noise_factor(const NetworkParams& params);

/**
 * \brief Integral of u / (1 + (u/r)^beta / T) over [from, inf).
 *
 * Adaptive Gauss-Kronrod on the bulk and an alternating series for the
 * far tail. from = 0 gives the full contention integral whose 2 pi multiple
 * equals C.
 *
 * \throws QuadratureError if the relative error estimate exceeds 1e-10.
 */
double contention_integral(const NetworkParams& params, double from = 0.0);

/// Goodput by quadrature of the Laplace functional (no closed form for K).
double goodput_integral(double p, const NetworkParams& params);

double goodput_typical(double p, const NetworkParams& params);
double goodput_tagged(double p_tag, double p, const NetworkParams& params);

/// Noise-free forms used by the games.
double goodput_typical(double p, const ContentionModel& model);
double goodput_tagged(double p_tag, double p, const ContentionModel& model);

/// min{1, 1/(lambda C)}
double team_optimal_map(const ContentionModel& model);
double team_optimal_map(const NetworkParams& params);

struct TeamDensities {
  double success = 0.0;  ///< d_s(p_m) = lambda g(p_m)
  double delay = 0.0;    ///< d_t(p_m) = lambda / g(p_m)
};

TeamDensities team_densities(const ContentionModel& model);
TeamDensities team_densities(const NetworkParams& params);

/// Check that p is a probability; throws DomainError otherwise.
void require_probability(double p, const char* name);

}  // namespace sag
