#include "gpass/simulation.hpp"

#include "gpass/combinatorics.hpp"
#include "gpass/metrics.hpp"
#include "gpass/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace gpass {
namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
}

double log_binomial_pmf(std::int64_t n, std::int64_t c, double p) {
  if (p <= 0.0) return c == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return c == n ? 0.0 : -INFINITY;
  return log_binomial(n, c) + static_cast<double>(c) * std::log(p) +
         static_cast<double>(n - c) * std::log1p(-p);
}

// c ~ Binomial(n, p) for every trial, from stream (seed, n, trial).
std::vector<std::int64_t> draw_counts(const SimConfig& cfg, std::int64_t n) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(cfg.trials));
  auto fill = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      CounterRng rng(CounterRng::derive(cfg.seed, static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(t)));
      std::int64_t c = 0;
      for (std::int64_t i = 0; i < n; ++i) c += rng.bernoulli(cfg.p_star) ? 1 : 0;
      counts[static_cast<std::size_t>(t)] = c;
    }
  };
  const auto workers = static_cast<std::int64_t>(std::max(1u, cfg.threads));
  if (workers == 1) {
    fill(0, cfg.trials);
  } else {
    const std::int64_t chunk = (cfg.trials + workers - 1) / workers;
    std::vector<std::jthread> pool;
    for (std::int64_t w = 0; w < workers; ++w) {
      const std::int64_t b = w * chunk;
      const std::int64_t e = std::min(cfg.trials, b + chunk);
      if (b < e) pool.emplace_back(fill, b, e);
    }
  }
  return counts;
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  if (!(p_star >= 0.0 && p_star <= 1.0)) throw std::invalid_argument("p_star must lie in [0, 1]");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n_values.empty()) throw std::invalid_argument("at least one n value is required");
  for (auto n : n_values) {
    if (n < k) throw std::invalid_argument("every n must be >= k (n=" + std::to_string(n) + ")");
  }
  if (tau_values.empty()) throw std::invalid_argument("at least one tau value is required");
  for (double t : tau_values) check_tau(t);
}

double true_expected_g_pass(double p_star, std::int64_t n, std::int64_t k, double tau) {
  check_tau(tau);
  if (!(p_star >= 0.0 && p_star <= 1.0)) throw std::invalid_argument("p_star must lie in [0, 1]");
  if (k < 1 || k > n) throw std::invalid_argument("k must satisfy 1 <= k <= n");
  double sum = 0.0;
  for (std::int64_t c = 0; c <= n; ++c) {
    const double lw = log_binomial_pmf(n, c, p_star);
    if (std::isinf(lw)) continue;
    sum += std::exp(lw) * g_pass_at_k_tau(n, c, k, tau);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double true_estimator_std(double p_star, std::int64_t n, std::int64_t k, double tau) {
  const double mean = true_expected_g_pass(p_star, n, k, tau);
  double sum = 0.0;
  for (std::int64_t c = 0; c <= n; ++c) {
    const double lw = log_binomial_pmf(n, c, p_star);
    if (std::isinf(lw)) continue;
    const double d = g_pass_at_k_tau(n, c, k, tau) - mean;
    sum += std::exp(lw) * d * d;
  }
  return std::sqrt(sum);
}

SimResult run_unbiasedness_study(const SimConfig& cfg) {
  cfg.validate();
  SimResult result{cfg.k, cfg.p_star, {}};
  for (auto n : cfg.n_values) {
    const auto counts = draw_counts(cfg, n);
    for (double tau : cfg.tau_values) {
      // The estimator only depends on c, so tabulate it once per (n, tau).
      std::vector<double> estimate(static_cast<std::size_t>(n + 1));
      for (std::int64_t c = 0; c <= n; ++c) estimate[c] = g_pass_at_k_tau(n, c, cfg.k, tau);

      double sum = 0.0;
      for (auto c : counts) sum += estimate[c];
      const double mean = sum / static_cast<double>(cfg.trials);
      double ss = 0.0;
      for (auto c : counts) {
        const double d = estimate[c] - mean;
        ss += d * d;
      }
      const double var = cfg.trials > 1 ? ss / static_cast<double>(cfg.trials - 1) : 0.0;
      result.cells.push_back({n, tau, mean, std::sqrt(var),
                              true_expected_g_pass(cfg.p_star, n, cfg.k, tau), cfg.trials});
    }
  }
  return result;
}

std::vector<VarianceRow> variance_vs_n(const SimConfig& cfg) {
  if (cfg.n_values.size() < 2) throw std::invalid_argument("variance study needs >= 2 n values");
  const auto study = run_unbiasedness_study(cfg);
  std::vector<VarianceRow> rows;
  rows.reserve(study.cells.size());
  for (const auto& cell : study.cells) rows.push_back({cell.n, cell.tau, cell.estimator_std});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const VarianceRow& a, const VarianceRow& b) { return a.n < b.n; });
  return rows;
}

std::vector<CurveRow> emit_comparison_curves(std::int64_t n, const std::vector<std::int64_t>& c_values,
                                             std::int64_t k_max, const std::vector<double>& tau_values) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (k_max < 1 || k_max > n) throw std::invalid_argument("k_max must satisfy 1 <= k_max <= n");
  for (auto c : c_values) {
    if (c < 0 || c > n) throw std::invalid_argument("every c must satisfy 0 <= c <= n");
  }
  for (double t : tau_values) check_tau(t);

  std::vector<CurveRow> rows;
  rows.reserve(c_values.size() * static_cast<std::size_t>(k_max) * tau_values.size());
  for (auto c : c_values) {
    for (std::int64_t k = 1; k <= k_max; ++k) {
      const double pass = pass_at_k(n, c, k);
      for (double tau : tau_values) rows.push_back({k, tau, c, pass, g_pass_at_k_tau(n, c, k, tau)});
    }
  }
  return rows;
}

void write_curves(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "k,tau,c_or_n,metric,value\n";
  for (const auto& r : rows) {
    const auto prefix = std::to_string(r.k) + "," + fmt_real(r.tau) + "," + std::to_string(r.c) + ",";
    os << prefix << "pass_at_k," << fmt_real(r.pass_at_k) << '\n';
    os << prefix << "g_pass_at_k_tau," << fmt_real(r.g_pass_at_k_tau) << '\n';
  }
}

void write_study(std::ostream& os, const SimResult& result) {
  os << "k,tau,c_or_n,metric,value\n";
  for (const auto& cell : result.cells) {
    const auto prefix =
        std::to_string(result.k) + "," + fmt_real(cell.tau) + "," + std::to_string(cell.n) + ",";
    os << prefix << "estimator_mean," << fmt_real(cell.estimator_mean) << '\n';
    os << prefix << "estimator_std," << fmt_real(cell.estimator_std) << '\n';
    os << prefix << "true_value," << fmt_real(cell.true_value) << '\n';
    os << prefix << "trials," << cell.trials_used << '\n';
  }
}

void write_variance(std::ostream& os, std::int64_t k, const std::vector<VarianceRow>& rows) {
  os << "k,tau,c_or_n,metric,value\n";
  for (const auto& r : rows) {
    os << k << ',' << fmt_real(r.tau) << ',' << r.n << ",estimator_std," << fmt_real(r.std) << '\n';
  }
}

}  // namespace gpass
