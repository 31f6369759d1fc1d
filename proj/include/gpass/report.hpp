#pragma once

#include "gpass/metrics.hpp"
#include "gpass/records.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gpass {

/// (baseline - degraded) / baseline * 100; nullopt when baseline <= 0.
std::optional<double> drop_percentage(double baseline, double degraded);

/// One decimal with half-even rounding; positive values that round to zero print as "~0.0".
std::string format_percent(double percent);
std::string format_percent(std::optional<double> percent);  // nullopt -> "—"

struct SlopeResult {
  std::string group;
  double slope = 0.0;  // per unit tau
  std::vector<double> tau_grid;
  std::vector<double> values;
};

/// Least-squares slope of value against tau. Throws std::invalid_argument
/// with fewer than two distinct tau.
SlopeResult tau_slope(const std::vector<std::pair<double, double>>& points, std::string group = "ALL");

enum class GroupField { kDataset, kLanguage, kQuestionType };
enum class OutputFormat { kMarkdown, kDelimited };

std::optional<GroupField> parse_group_field(const std::string& s);
std::string to_string(GroupField f);

struct ReportOptions {
  MetricGrid grid;
  std::vector<GroupField> group_by;
  OutputFormat output_format = OutputFormat::kMarkdown;
  bool include_drops = false;
  bool include_slope = false;
};

/// A metric report joined with question attributes and greedy results.
struct Evaluation {
  MetricReport report;
  std::vector<const QuestionRecord*> questions;   // aligned with report.per_question
  std::vector<std::optional<double>> greedy;      // per question, mean over greedy runs
};

/// Joins a report with its questions and the greedy records of `generations`.
Evaluation make_evaluation(MetricReport report, const QuestionSet& questions,
                           const std::vector<GenerationRecord>& generations);

struct GroupSummary {
  std::string label;
  std::vector<std::size_t> rows;  // indices into report.per_question
  std::optional<double> greedy;   // fraction in [0,1]; nullopt without greedy records
};

/// Groups sorted by key, followed by the ALL group (always present).
std::vector<GroupSummary> summarize_groups(const Evaluation& eval, const std::vector<GroupField>& group_by);

struct Rendered {
  std::string text;
  std::vector<std::string> warnings;
};

/// Columns: Greedy, G-Pass@k_{->0}, G-Pass@k_tau ascending, mG-Pass@k, one
/// table per k. Values are percentages.
Rendered render_main_table(const Evaluation& eval, const ReportOptions& opts);

/// Per group: Pass@k, Greedy with its drop vs. Pass@k, G-Pass@k_{1.0} with
/// its drop vs. Greedy; three columns per group on one row.
Rendered render_difficulty_table(const Evaluation& eval, const ReportOptions& opts,
                                 const std::string& row_label = "model");

/// Slope of the aggregate G-Pass@k_tau curve (largest k) for every group.
Rendered render_slope_table(const Evaluation& eval, const ReportOptions& opts);

}  // namespace gpass
