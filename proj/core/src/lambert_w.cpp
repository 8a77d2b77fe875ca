#include "sag/lambert_w.hpp"

#include <array>
#include <cmath>
#include <string>

#include "sag/errors.hpp"

namespace sag {

namespace {

// 1/e split into a double and its rounding error, so that x + 1/e is exact
// for x next to the branch point.
constexpr double kInvEHi = 0.36787944117144233;
constexpr double kInvELo = -1.2428753672788363e-17;
constexpr double kE = 2.718281828459045;

constexpr double kClampSlack = 1e-15;
constexpr double kSeriesRadius = 1e-2;
constexpr int kMaxIterations = 64;

// W = -1 + p - p^2/3 + 11/72 p^3 - ... with p = +-sqrt(2(ex + 1)).
constexpr std::array<double, 10> kBranchSeries = {
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680863.0 / 43545600.0,
    -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
};

double branch_series(double p, std::size_t terms) {
  double sum = 0.0;
  for (std::size_t k = terms; k-- > 0;) {
    sum = sum * p + kBranchSeries[k];
  }
  return sum;
}

double halley(double x, double w) {
  for (int i = 0; i < kMaxIterations; ++i) {
    const double wp1 = w + 1.0;
    // w - x e^{-w} keeps the iteration finite for large |w| on either branch.
    const double t = w - x * std::exp(-w);
    const double step = t / (wp1 - (w + 2.0) * t / (2.0 * wp1));
    w -= step;
    if (!(std::abs(step) > 1e-14 * std::max(1.0, std::abs(w)))) {
      break;
    }
  }
  return w;
}

}  // namespace

const char* to_string(Branch branch) noexcept {
  return branch == Branch::Principal ? "W0" : "W-1";
}

double lambert_w(double x, Branch branch) {
  if (std::isnan(x)) {
    throw DomainError("lambert_w: argument is NaN");
  }
  const double dx = (x + kInvEHi) + kInvELo;  // x + 1/e
  if (dx < -kClampSlack) {
    throw DomainError("lambert_w: argument " + std::to_string(x) + " is below -1/e");
  }
  if (branch == Branch::Minus1 && x >= 0.0) {
    throw DomainError("lambert_w: lower branch requires x < 0");
  }
  if (dx <= 0.0) {
    return -1.0;
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (std::isinf(x)) {
    return x;
  }

  const double sign = branch == Branch::Principal ? 1.0 : -1.0;
  const double p = sign * std::sqrt(2.0 * kE * dx);
  if (std::abs(p) < kSeriesRadius) {
    return branch_series(p, kBranchSeries.size());
  }

  double w0 = 0.0;
  if (branch == Branch::Principal) {
    if (x < -0.3) {
      w0 = branch_series(p, 4);
    } else if (x < 3.0) {
      w0 = std::log1p(x);
    } else {
      const double l1 = std::log(x);
      const double l2 = std::log(l1);
      w0 = l1 - l2 + l2 / l1;
    }
  } else {
    if (x < -0.25) {
      w0 = branch_series(p, 4);
    } else {
      const double l1 = std::log(-x);
      const double l2 = std::log(-l1);
      w0 = l1 - l2 + l2 / l1;
    }
  }
  return halley(x, w0);
}

double lambert_w_prime(double x, Branch branch) {
  if (x == 0.0) {
    throw DomainError("lambert_w_prime: singular at x = 0");
  }
  const double dx = (x + kInvEHi) + kInvELo;
  if (std::abs(dx) <= kClampSlack) {
    throw DomainError("lambert_w_prime: singular at the branch point -1/e");
  }
  const double w = lambert_w(x, branch);
  return w / (x * (1.0 + w));
}

}  // namespace sag
