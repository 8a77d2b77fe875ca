#include "sag/game_types.hpp"

#include <cmath>

#include "sag/errors.hpp"

namespace sag {

const char* to_string(Metric metric) noexcept {
  return metric == Metric::Goodput ? "goodput" : "delay";
}

const char* to_string(EquilibriumKind kind) noexcept {
  switch (kind) {
    case EquilibriumKind::Boundary0:
      return "boundary0";
    case EquilibriumKind::Boundary1:
      return "boundary1";
    case EquilibriumKind::Interior:
      return "interior";
    case EquilibriumKind::LambertPrincipal:
      return "W0";
    case EquilibriumKind::LambertMinus1:
      return "W-1";
  }
  return "unknown";
}

void GameConfig::validate() const {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw DomainError("rho must be a non-negative finite number");
  }
}

}  // namespace sag
