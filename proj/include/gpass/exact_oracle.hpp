#pragma once

// Big-integer ground truth for the combinatorial kernels. Slow; intended for
// tests and small instances.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace gpass::exact {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::int64_t kMaxN = 512;

/// C(n, k) exactly; zero when k > n.
Integer binomial(std::int64_t n, std::int64_t k);

/// Exact hypergeometric upper tail sum_{j >= j_min}. Throws std::out_of_range
/// for n > kMaxN and std::invalid_argument for inconsistent counts.
Rational tail(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t j_min);

/// 1 - C(n-c,k)/C(n,k), evaluated directly (not via the tail).
Rational pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k);

/// (2/k) * sum_{i=ceil(k/2)+1..k} tail(n, c, k, i).
Rational mg_pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k);

double to_double(const Rational& r);

}  // namespace gpass::exact
