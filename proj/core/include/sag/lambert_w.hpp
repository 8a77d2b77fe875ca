#pragma once

/**
 * \file lambert_w.hpp
 * \brief Real Lambert W on its two real branches.
 *
 * W is the inverse of w -> w e^w. On [-1/e, 0) it is two-valued: the
 * principal branch W0 takes values in [-1, 0) and the lower branch W-1 takes
 * values in (-inf, -1]. Both meet at x = -1/e where W = -1.
 */

namespace sag {

enum class Branch { Principal, Minus1 };

/// Short name used in reports: "W0" or "W-1".
const char* to_string(Branch branch) noexcept;

/// Branch point x = -1/e.
inline constexpr double kBranchPoint = -0.36787944117144233;

/**
 * \brief Evaluates W(x) on the requested branch.
 *
 * Halley iteration from branch-specific starting points; inputs closer than
 * 1e-3 (in sqrt(2(ex+1))) to the branch point use the branch-point series
 * directly. The residual |W e^W - x| is below 1e-12 max(1, |x|).
 *
 * Inputs up to 1e-15 below -1/e are treated as -1/e.
 *
 * \throws DomainError if x < -1/e, or if branch is Minus1 and x >= 0.
 */
double lambert_w(double x, Branch branch = Branch::Principal);

/// W'(x) = W(x) / (x (1 + W(x))). Throws DomainError at x = 0 and x = -1/e.
double lambert_w_prime(double x, Branch branch = Branch::Principal);

}  // namespace sag
