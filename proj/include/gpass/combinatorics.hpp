#pragma once

#include <cstdint>
#include <limits>

namespace gpass {

/// Natural-log probability. `-inf` encodes an exact zero.
struct LogProb {
  double value = -std::numeric_limits<double>::infinity();

  static constexpr LogProb zero() { return {}; }
  static constexpr LogProb one() { return {0.0}; }

  bool is_zero() const { return value == -std::numeric_limits<double>::infinity(); }
  double prob() const;
};

/// Parameters of a draw of `k` items without replacement from `n` items of
/// which `c` are successes, observing `j` successes.
struct HypergeomParams {
  std::int64_t n = 0;
  std::int64_t c = 0;
  std::int64_t k = 0;
  std::int64_t j = 0;

  /// Throws std::invalid_argument unless 0 <= c <= n, 1 <= k <= n, 0 <= j <= k.
  void validate() const;
};

/// ln C(n, k). Returns -inf when k > n and exactly 0 when k == 0 or k == n.
/// Symmetric in k <-> n - k bit for bit.
double log_binomial(std::int64_t n, std::int64_t k);

/// Log of the hypergeometric PMF; exact zero outside the support.
LogProb log_hypergeom_pmf(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t j);

/// C(c,j) C(n-c,k-j) / C(n,k).
double hypergeom_pmf(const HypergeomParams& p);

/// Upper tail sum_{j >= j_min} of the hypergeometric PMF, accumulated with a
/// max-shifted log-sum-exp. `j_min == 0` returns exactly 1.
double hypergeom_tail(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t j_min);

}  // namespace gpass
