#include "gpass/metrics.hpp"

#include "gpass/combinatorics.hpp"
#include "gpass/tolerances.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gpass {
namespace {

void check_counts(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("k must satisfy 1 <= k <= n (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
  }
  if (c < 0 || c > n) {
    throw std::invalid_argument("c must satisfy 0 <= c <= n (n=" + std::to_string(n) +
                                ", c=" + std::to_string(c) + ")");
  }
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must lie in (0, 1]");
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_tau(double tau) {
  std::ostringstream os;
  os << tau;
  return os.str();
}

}  // namespace

std::int64_t threshold_count(double tau, std::int64_t k) {
  check_tau(tau);
  const double x = tau * static_cast<double>(k);
  const double nearest = std::round(x);
  const double j = std::abs(x - nearest) <= tol::kTauSnap ? nearest : std::ceil(x);
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(j), 1, k);
}

double pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k) {
  check_counts(n, c, k);
  const double miss = std::exp(log_binomial(n - c, k) - log_binomial(n, k));
  return 1.0 - miss;
}

double g_pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k) {
  check_counts(n, c, k);
  return log_hypergeom_pmf(n, c, k, k).prob();
}

double g_pass_at_k_ratio(std::int64_t n, std::int64_t c, std::int64_t k, std::int64_t i) {
  check_counts(n, c, k);
  if (i < 1 || i > k) throw std::invalid_argument("ratio numerator must lie in [1, k]");
  return hypergeom_tail(n, c, k, i);
}

double g_pass_at_k_tau(std::int64_t n, std::int64_t c, std::int64_t k, double tau) {
  check_counts(n, c, k);
  return hypergeom_tail(n, c, k, threshold_count(tau, k));
}

double mg_pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k) {
  check_counts(n, c, k);
  double sum = 0.0;
  for (std::int64_t i = (k + 1) / 2 + 1; i <= k; ++i) sum += hypergeom_tail(n, c, k, i);
  return 2.0 * sum / static_cast<double>(k);
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kPassAtK:
      return "pass_at_k";
    case MetricKind::kGPassAtKTau:
      return "g_pass_at_k_tau";
    case MetricKind::kMGPassAtK:
      return "mg_pass_at_k";
  }
  return "unknown";
}

std::string MetricKey::label() const {
  const auto ks = std::to_string(k);
  switch (kind) {
    case MetricKind::kPassAtK:
      return "G-Pass@" + ks + "_{->0}";
    case MetricKind::kGPassAtKTau:
      return "G-Pass@" + ks + "_{" + format_tau(tau) + "}";
    case MetricKind::kMGPassAtK:
      return "mG-Pass@" + ks;
  }
  return "?";
}

void MetricGrid::validate() const {
  if (k_values.empty()) throw std::invalid_argument("metric grid needs at least one k");
  if (!std::is_sorted(k_values.begin(), k_values.end()) ||
      std::adjacent_find(k_values.begin(), k_values.end()) != k_values.end()) {
    throw std::invalid_argument("k values must be strictly ascending");
  }
  if (k_values.front() < 1) throw std::invalid_argument("k values must be >= 1");
  for (double t : tau_values) check_tau(t);
  if (std::set<double>(tau_values.begin(), tau_values.end()).size() != tau_values.size()) {
    throw std::invalid_argument("duplicate tau values");
  }
}

std::int64_t MetricGrid::max_k() const { return k_values.empty() ? 0 : k_values.back(); }

std::vector<MetricKey> MetricGrid::keys() const {
  std::vector<double> taus = tau_values;
  std::sort(taus.begin(), taus.end());
  std::vector<MetricKey> out;
  for (auto k : k_values) {
    if (include_pass_at_k) out.push_back({MetricKind::kPassAtK, k, 0.0});
    for (double t : taus) out.push_back({MetricKind::kGPassAtKTau, k, t});
    if (include_mg_pass) out.push_back({MetricKind::kMGPassAtK, k, 0.0});
  }
  return out;
}

std::size_t MetricReport::index_of(const MetricKey& key) const {
  const auto it = std::find(keys.begin(), keys.end(), key);
  if (it == keys.end()) throw std::out_of_range("metric not in report: " + key.label());
  return static_cast<std::size_t>(it - keys.begin());
}

double MetricReport::aggregate_value(const MetricKey& key) const {
  return aggregate.at(index_of(key));
}

double MetricReport::mean_over(const MetricKey& key, const std::vector<std::size_t>& rows) const {
  if (rows.empty()) throw std::invalid_argument("mean over an empty set of questions");
  const auto idx = index_of(key);
  double sum = 0.0;
  for (auto r : rows) sum += per_question.at(r).values[idx];
  return sum / static_cast<double>(rows.size());
}

MetricReport compute_report(const TallySet& tallies, const MetricGrid& grid,
                            const ComputeOptions& options) {
  grid.validate();
  if (tallies.empty()) throw std::invalid_argument("empty tally set");

  MetricReport report;
  report.grid = grid;
  report.keys = grid.keys();
  report.timestamp = options.timestamp.empty() ? utc_now() : options.timestamp;

  const auto k_max = grid.max_k();
  std::set<std::string> seen;
  for (const auto& t : tallies) {
    if (!seen.insert(t.question_id).second) {
      throw std::invalid_argument("duplicate question_id in tally set: " + t.question_id);
    }
    if (t.n < 1 || t.c < 0 || t.c > t.n) {
      throw std::invalid_argument("malformed tally for question " + t.question_id);
    }
    if (t.n < k_max) {
      throw std::invalid_argument("question " + t.question_id + " has n=" + std::to_string(t.n) +
                                  " < k=" + std::to_string(k_max));
    }
    if (t.n < 3 * k_max) {
      report.warnings.push_back("question " + t.question_id + ": n=" + std::to_string(t.n) +
                                " < 3k=" + std::to_string(3 * k_max) +
                                "; estimates may be unstable");
    }
  }

  report.per_question.resize(tallies.size());
  auto evaluate = [&](std::size_t q) {
    const auto& t = tallies[q];
    QuestionMetrics row{t.question_id, t.n, t.c, {}};
    row.values.reserve(report.keys.size());
    for (const auto& key : report.keys) {
      switch (key.kind) {
        case MetricKind::kPassAtK:
          row.values.push_back(pass_at_k(t.n, t.c, key.k));
          break;
        case MetricKind::kGPassAtKTau:
          row.values.push_back(g_pass_at_k_tau(t.n, t.c, key.k, key.tau));
          break;
        case MetricKind::kMGPassAtK:
          row.values.push_back(mg_pass_at_k(t.n, t.c, key.k));
          break;
      }
    }
    report.per_question[q] = std::move(row);
  };

  const unsigned workers =
      std::clamp<unsigned>(options.threads, 1u, static_cast<unsigned>(tallies.size()));
  if (workers == 1) {
    for (std::size_t q = 0; q < tallies.size(); ++q) evaluate(q);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t q = w; q < tallies.size(); q += workers) evaluate(q);
      });
    }
  }

  // Reduction runs in question order so the result does not depend on `threads`.
  report.aggregate.assign(report.keys.size(), 0.0);
  for (const auto& row : report.per_question) {
    for (std::size_t i = 0; i < row.values.size(); ++i) report.aggregate[i] += row.values[i];
  }
  for (auto& v : report.aggregate) v /= static_cast<double>(report.per_question.size());
  return report;
}

}  // namespace gpass
