#include "sag/spatial_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sag/errors.hpp"

namespace sag {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-10;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

// Integral of u / (1 + (u/knee)^beta) over [from, inf) for from >= knee,
// expanded in q = (knee/from)^beta.
double far_tail(double from, double knee, double beta) {
  const double q = std::pow(knee / from, beta);
  double sum = 0.0;
  double qk = q;
  for (int k = 0; k < 200; ++k) {
    const double term = qk / (beta * (k + 1) - 2.0);
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-17 * std::abs(sum)) {
      break;
    }
    qk *= q;
  }
  return from * from * sum;
}

}  // namespace

void NetworkParams::validate() const {
  require_positive(lambda, "lambda");
  require_positive(r, "r");
  if (!(beta > 2.0) || !std::isfinite(beta)) {
    throw DomainError("beta must exceed 2");
  }
  require_positive(T, "T");
  require_positive(A, "A");
  require_positive(mu, "mu");
  require_positive(P, "P");
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw DomainError("w must be non-negative");
  }
}

double NetworkParams::attenuation(double distance) const {
  return std::pow(A * distance, -beta);
}

ContentionModel ContentionModel::from(const NetworkParams& params) {
  return {params.lambda, contention_constant(params).C};
}

void ContentionModel::validate() const {
  require_positive(lambda, "lambda");
  require_positive(C, "C");
}

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1]");
  }
}

double spatial_contention(double beta) {
  if (!(beta > 2.0) || !std::isfinite(beta)) {
    throw DomainError("spatial_contention: beta must exceed 2");
  }
  // Gamma(2/b) Gamma(1 - 2/b) = pi / sin(2 pi / b)
  return (kPi / beta) / std::sin(2.0 * kPi / beta);
}

ModelConstants contention_constant(const NetworkParams& params) {
  params.validate();
  ModelConstants constants;
  constants.K_beta = spatial_contention(params.beta);
  constants.C = 2.0 * kPi * params.r * params.r * std::pow(params.T, 2.0 / params.beta) *
                constants.K_beta;
  constants.C_bar = 0.5 * constants.C;
  return constants;
}

double noise_factor(const NetworkParams& params) {
  if (params.w == 0.0) {
    return 1.0;
  }
  return std::exp(-params.mu * params.T * params.w / (params.P * params.attenuation(params.r)));
}

double contention_integral(const NetworkParams& params, double from) {
  params.validate();
  if (!(from >= 0.0)) {
    throw DomainError("contention_integral: lower limit must be non-negative");
  }
  const double beta = params.beta;
  // 1 + (u/r)^beta / T = 1 + (u/knee)^beta
  const double knee = params.r * std::pow(params.T, 1.0 / beta);
  const auto integrand = [knee, beta](double u) { return u / (1.0 + std::pow(u / knee, beta)); };

  const std::array<double, 4> breaks = {knee, 10.0 * knee, 100.0 * knee, 1000.0 * knee};
  double lower = from;
  double total = 0.0;
  double error_total = 0.0;
  for (double upper : breaks) {
    if (upper <= lower) {
      continue;
    }
    double error = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, lower, upper, 20, kQuadratureTolerance, &error);
    error_total += error;
    lower = upper;
  }
  total += far_tail(lower, knee, beta);

  if (!std::isfinite(total) || error_total > kQuadratureTolerance * std::abs(total)) {
    throw QuadratureError("contention_integral: error estimate " + std::to_string(error_total) +
                          " exceeds tolerance");
  }
  return total;
}

double goodput_integral(double p, const NetworkParams& params) {
  require_probability(p, "p");
  params.validate();
  if (p == 0.0) {
    return 0.0;
  }
  const double integral = contention_integral(params);
  return p * std::exp(-2.0 * kPi * params.lambda * p * integral) * noise_factor(params);
}

double goodput_typical(double p, const NetworkParams& params) {
  return goodput_tagged(p, p, params);
}

double goodput_tagged(double p_tag, double p, const NetworkParams& params) {
  require_probability(p_tag, "p_tag");
  require_probability(p, "p");
  const double C = contention_constant(params).C;
  return p_tag * std::exp(-p * params.lambda * C) * noise_factor(params);
}

double goodput_typical(double p, const ContentionModel& model) {
  return goodput_tagged(p, p, model);
}

double goodput_tagged(double p_tag, double p, const ContentionModel& model) {
  require_probability(p_tag, "p_tag");
  require_probability(p, "p");
  return p_tag * std::exp(-p * model.load());
}

double team_optimal_map(const ContentionModel& model) {
  model.validate();
  return std::min(1.0, 1.0 / model.load());
}

double team_optimal_map(const NetworkParams& params) {
  return team_optimal_map(ContentionModel::from(params));
}

TeamDensities team_densities(const ContentionModel& model) {
  model.validate();
  const double lambda = model.lambda;
  const double load = model.load();
  if (load > 1.0) {
    return {1.0 / (std::numbers::e * model.C), lambda * lambda * std::numbers::e * model.C};
  }
  return {lambda * std::exp(-load), lambda * std::exp(load)};
}

TeamDensities team_densities(const NetworkParams& params) {
  return team_densities(ContentionModel::from(params));
}

}  // namespace sag
