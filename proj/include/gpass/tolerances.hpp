#pragma once

// Numerical tolerances shared by the kernels and their tests.

namespace gpass::tol {

// Target relative accuracy of log_binomial for n <= 10'000.
inline constexpr double kLogBinomialRel = 1e-12;

// Float kernels vs. the exact rational oracle (absolute).
inline constexpr double kOracleAbs = 1e-10;

// Sum of a hypergeometric PMF over its support (absolute).
inline constexpr double kPmfSumAbs = 1e-10;

// Pass@k vs. G-Pass@k_tau with ceil(tau*k) == 1 (absolute).
inline constexpr double kIdentityAbs = 1e-12;

// tau*k within this distance of an integer is snapped before the ceiling.
inline constexpr double kTauSnap = 1e-9;

}  // namespace gpass::tol
