#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gpass {

struct SimConfig {
  double p_star = 0.4;
  std::vector<std::int64_t> n_values{16, 32, 48, 128, 240};
  std::int64_t k = 16;
  std::vector<double> tau_values{0.25, 0.5, 0.75, 1.0};
  std::int64_t trials = 20'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // does not affect results

  void validate() const;
};

struct SimCell {
  std::int64_t n = 0;
  double tau = 0.0;
  double estimator_mean = 0.0;
  double estimator_std = 0.0;  // sample standard deviation over trials
  double true_value = 0.0;
  std::int64_t trials_used = 0;
};

struct SimResult {
  std::int64_t k = 0;
  double p_star = 0.0;
  std::vector<SimCell> cells;  // ordered by n (config order), then tau (config order)
};

/// Sum over c of Binomial(c; n, p_star) * G-Pass@k_tau(n, c).
double true_expected_g_pass(double p_star, std::int64_t n, std::int64_t k, double tau);

/// Standard deviation of the estimator over c ~ Binomial(n, p_star).
double true_estimator_std(double p_star, std::int64_t n, std::int64_t k, double tau);

/// Draws c ~ Binomial(n, p_star) `trials` times per n (one Bernoulli per run)
/// and evaluates the G-Pass@k_tau estimator on each draw.
SimResult run_unbiasedness_study(const SimConfig& cfg);

struct VarianceRow {
  std::int64_t n = 0;
  double tau = 0.0;
  double std = 0.0;
};

/// Monte Carlo standard deviation of the estimator per (n, tau), sorted by n.
std::vector<VarianceRow> variance_vs_n(const SimConfig& cfg);

struct CurveRow {
  std::int64_t k = 0;
  double tau = 0.0;
  std::int64_t c = 0;
  double pass_at_k = 0.0;
  double g_pass_at_k_tau = 0.0;
};

/// Pass@k and G-Pass@k_tau for k = 1..k_max, each tau and each c, at fixed n.
/// Rows are ordered by c, then k, then tau.
std::vector<CurveRow> emit_comparison_curves(std::int64_t n, const std::vector<std::int64_t>& c_values,
                                             std::int64_t k_max, const std::vector<double>& tau_values);

// Tabular output: comma-separated, header "k,tau,c_or_n,metric,value",
// reals printed with 17 significant digits.
void write_curves(std::ostream& os, const std::vector<CurveRow>& rows);
void write_study(std::ostream& os, const SimResult& result);
void write_variance(std::ostream& os, std::int64_t k, const std::vector<VarianceRow>& rows);

}  // namespace gpass
