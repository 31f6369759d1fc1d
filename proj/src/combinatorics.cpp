#include "gpass/combinatorics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpass {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(i!) for i <= kTableMax, accumulated in extended precision.
constexpr std::int64_t kTableMax = 1024;

const std::vector<long double>& log_factorial_table() {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(kTableMax + 1);
    t[0] = 0.0L;
    for (std::int64_t i = 1; i <= kTableMax; ++i) {
      t[i] = t[i - 1] + std::log(static_cast<long double>(i));
    }
    return t;
  }();
  return table;
}

}  // namespace

double LogProb::prob() const { return is_zero() ? 0.0 : std::exp(value); }

void HypergeomParams::validate() const {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n || j < 0 || j > k) {
    throw std::invalid_argument("invalid hypergeometric parameters (n=" + std::to_string(n) +
                                ", c=" + std::to_string(c) + ", k=" + std::to_string(k) +
                                ", j=" + std::to_string(j) + ")");
  }
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0) {
    throw std::invalid_argument("log_binomial requires non-negative arguments");
  }
  if (k > n) return kNegInf;
  const std::int64_t m = std::min(k, n - k);
  if (m == 0) return 0.0;

  if (n <= kTableMax) {
    const auto& lf = log_factorial_table();
    return static_cast<double>(lf[n] - lf[m] - lf[n - m]);
  }
  // ln C(n, m) = sum_{i=1..m} ln((n - m + i) / i); every term is positive.
  long double acc = 0.0L;
  const long double base = static_cast<long double>(n - m);
  for (std::int64_t i = 1; i <= m; ++i) {
    const long double li = static_cast<long double>(i);
    acc += std::log((base + li) / li);
  }
  return static_cast<double>(acc);
}

LogProb log_hypergeom_pmf(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t j) {
  if (j < 0 || j > c || j > k || k - j > n - c) return LogProb::zero();
  return {log_binomial(c, j) + log_binomial(n - c, k - j) - log_binomial(n, k)};
}

double hypergeom_pmf(const HypergeomParams& p) {
  p.validate();
  return log_hypergeom_pmf(p.n, p.c, p.k, p.j).prob();
}

double hypergeom_tail(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t j_min) {
  HypergeomParams{n, c, k, 0}.validate();
  if (j_min < 0 || j_min > k) {
    throw std::invalid_argument("hypergeom_tail requires 0 <= j_min <= k");
  }
  if (j_min == 0) return 1.0;

  const std::int64_t lo = std::max(j_min, k - (n - c));
  const std::int64_t hi = std::min(c, k);
  if (lo > hi) return 0.0;

  // Terms are collected first so the shift uses the true maximum.
  std::array<double, 64> small{};
  std::vector<double> large;
  const auto count = static_cast<std::size_t>(hi - lo + 1);
  double* terms = small.data();
  if (count > small.size()) {
    large.resize(count);
    terms = large.data();
  }
  double shift = kNegInf;
  for (std::int64_t j = lo; j <= hi; ++j) {
    const double t = log_hypergeom_pmf(n, c, k, j).value;
    terms[j - lo] = t;
    shift = std::max(shift, t);
  }
  if (shift == kNegInf) return 0.0;

  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += std::exp(terms[i] - shift);
  const double value = std::exp(shift) * sum;
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace gpass
