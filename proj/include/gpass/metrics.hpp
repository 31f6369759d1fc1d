#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace gpass {

/// Per-question counts: `n` sampled generations, `c` of them judged correct.
struct Tally {
  std::string question_id;
  std::int64_t n = 0;
  std::int64_t c = 0;
};

using TallySet = std::vector<Tally>;

/// Minimum number of correct draws out of k demanded by threshold tau, using
/// a snap-to-integer guard before the ceiling. Always >= 1 for tau > 0.
std::int64_t threshold_count(double tau, std::int64_t k);

double pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k);

/// Probability that all k draws are correct: C(c,k) / C(n,k).
double g_pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k);

/// Probability that at least ceil(tau*k) of k draws are correct, tau in (0, 1].
double g_pass_at_k_tau(std::int64_t n, std::int64_t c, std::int64_t k, double tau);

/// Same as g_pass_at_k_tau with tau given exactly as the ratio i/k.
double g_pass_at_k_ratio(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t i);

/// Mean of G-Pass@k_{i/k} for i in (ceil(k/2), k], scaled by 2/k.
double mg_pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k);

enum class MetricKind { kPassAtK, kGPassAtKTau, kMGPassAtK };

std::string to_string(MetricKind kind);

/// Identifies one metric column. `tau` is 0 for the tau-free metrics.
struct MetricKey {
  MetricKind kind = MetricKind::kPassAtK;
  std::int64_t k = 0;
  double tau = 0.0;

  auto operator<=>(const MetricKey&) const = default;
  std::string label() const;
};

struct MetricGrid {
  std::vector<std::int64_t> k_values{4, 8, 16};
  std::vector<double> tau_values{0.25, 0.5, 0.75, 1.0};
  bool include_pass_at_k = true;
  bool include_mg_pass = true;

  /// Throws std::invalid_argument on empty/unsorted k, k < 1 or tau outside (0, 1].
  void validate() const;
  std::int64_t max_k() const;
  /// Key order: for each k ascending: Pass@k, G-Pass@k_tau per tau, mG-Pass@k.
  std::vector<MetricKey> keys() const;
};

struct QuestionMetrics {
  std::string question_id;
  std::int64_t n = 0;
  std::int64_t c = 0;
  std::vector<double> values;  // aligned with MetricReport::keys
};

struct MetricReport {
  std::vector<MetricKey> keys;
  std::vector<QuestionMetrics> per_question;
  std::vector<double> aggregate;  // unweighted mean over questions
  MetricGrid grid;
  std::string timestamp;
  std::vector<std::string> warnings;

  /// Index of `key` in `keys`; throws std::out_of_range when absent.
  std::size_t index_of(const MetricKey& key) const;
  double aggregate_value(const MetricKey& key) const;
  /// Unweighted mean of one metric over a subset of per_question rows.
  double mean_over(const MetricKey& key, const std::vector<std::size_t>& rows) const;
};

struct ComputeOptions {
  unsigned threads = 1;
  std::string timestamp;  // copied into the report; empty means "now" (UTC, ISO 8601)
};

/// Evaluates every grid metric per question and macro-averages them.
/// Throws std::invalid_argument for an empty tally set, a malformed tally or
/// any n < max k. Questions with n < 3 * max k produce a warning.
MetricReport compute_report(const TallySet& tallies, const MetricGrid& grid,
                            const ComputeOptions& options = {});

}  // namespace gpass
