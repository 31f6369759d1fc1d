#include "gpass/exact_oracle.hpp"

#include <stdexcept>
#include <string>

namespace gpass::exact {
namespace {

void check(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (n > kMaxN) {
    throw std::out_of_range("exact oracle bound exceeded: n=" + std::to_string(n) + " > " +
                            std::to_string(kMaxN));
  }
  if (n < 1 || c < 0 || c > n || k < 1 || k > n) {
    throw std::invalid_argument("exact oracle: inconsistent counts");
  }
}

}  // namespace

Integer binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0) throw std::invalid_argument("binomial of negative argument");
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  Integer r = 1;
  // Each partial product r * (n-k+i) / i is itself C(n-k+i, i), so divisions are exact.
  for (std::int64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

Rational tail(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t j_min) {
  check(n, c, k);
  if (j_min < 0 || j_min > k) throw std::invalid_argument("exact oracle: j_min out of range");
  Integer num = 0;
  for (std::int64_t j = j_min; j <= k; ++j) {
    num += binomial(c, j) * binomial(n - c, k - j);
  }
  return Rational(num, binomial(n, k));
}

Rational pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k) {
  check(n, c, k);
  return Rational(1) - Rational(binomial(n - c, k), binomial(n, k));
}

Rational mg_pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k) {
  check(n, c, k);
  Rational sum = 0;
  for (std::int64_t i = (k + 1) / 2 + 1; i <= k; ++i) sum += tail(n, c, k, i);
  return sum * Rational(2, k);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace gpass::exact
