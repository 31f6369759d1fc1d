#include "gpass/report.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gpass {
namespace {

constexpr const char* kDash = "—";

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render(OutputFormat fmt) const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      if (fmt == OutputFormat::kDelimited) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      } else {
        os << '|';
        for (const auto& c : cells) os << ' ' << c << " |";
      }
      os << '\n';
    };
    line(header);
    if (fmt == OutputFormat::kMarkdown) {
      os << "|---|";
      for (std::size_t i = 1; i < header.size(); ++i) os << "---:|";
      os << '\n';
    }
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

std::string tau_text(double tau) {
  std::ostringstream os;
  os << tau;
  return os.str();
}

std::string group_value(const QuestionRecord& q, GroupField f) {
  switch (f) {
    case GroupField::kDataset:
      return q.dataset;
    case GroupField::kLanguage:
      return to_string(q.language);
    case GroupField::kQuestionType:
      return to_string(q.question_type);
  }
  return {};
}

// MetricKey::label() with the draw count left as "k".
std::string generic_label(MetricKind kind, double tau) {
  auto text = MetricKey{kind, 1, tau}.label();
  const auto at = text.find("@1");
  return text.replace(at, 2, "@k");
}

double mean_metric(const Evaluation& eval, const GroupSummary& g, const MetricKey& key) {
  return eval.report.mean_over(key, g.rows);
}

}  // namespace

std::optional<double> drop_percentage(double baseline, double degraded) {
  if (!(baseline > 0.0)) return std::nullopt;
  return (baseline - degraded) / baseline * 100.0;
}

std::string format_percent(double percent) {
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double tenths = std::nearbyint(percent * 10.0);
  std::fesetround(saved);
  if (percent > 0.0 && tenths == 0.0) return "~0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", tenths / 10.0 + 0.0);
  return buf;
}

std::string format_percent(std::optional<double> percent) {
  return percent ? format_percent(*percent) : std::string(kDash);
}

SlopeResult tau_slope(const std::vector<std::pair<double, double>>& points, std::string group) {
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.first);
  if (distinct.size() < 2) throw std::invalid_argument("tau slope needs at least two distinct tau");

  SlopeResult out;
  out.group = std::move(group);
  double tau_mean = 0.0;
  for (const auto& [tau, value] : points) {
    out.tau_grid.push_back(tau);
    out.values.push_back(value);
    tau_mean += tau;
  }
  tau_mean /= static_cast<double>(points.size());
  // Values are centred on the first point; the covariance is unchanged and a
  // flat curve gives exactly zero.
  const double anchor = points.front().second;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [tau, value] : points) {
    const double dx = tau - tau_mean;
    sxy += dx * (value - anchor);
    sxx += dx * dx;
  }
  out.slope = sxy / sxx + 0.0;
  return out;
}

std::optional<GroupField> parse_group_field(const std::string& s) {
  if (s == "dataset") return GroupField::kDataset;
  if (s == "language") return GroupField::kLanguage;
  if (s == "question_type") return GroupField::kQuestionType;
  return std::nullopt;
}

std::string to_string(GroupField f) {
  switch (f) {
    case GroupField::kDataset:
      return "dataset";
    case GroupField::kLanguage:
      return "language";
    case GroupField::kQuestionType:
      return "question_type";
  }
  return {};
}

Evaluation make_evaluation(MetricReport report, const QuestionSet& questions,
                           const std::vector<GenerationRecord>& generations) {
  std::unordered_map<std::string, std::pair<double, int>> greedy;
  for (const auto& g : generations) {
    if (g.run_kind != RunKind::kGreedy || !g.judged_correct) continue;
    auto& [sum, count] = greedy[g.question_id];
    sum += *g.judged_correct ? 1.0 : 0.0;
    ++count;
  }
  Evaluation eval{std::move(report), {}, {}};
  for (const auto& row : eval.report.per_question) {
    const auto* q = questions.find(row.question_id);
    if (q == nullptr) throw std::invalid_argument("report question missing from question set: " + row.question_id);
    eval.questions.push_back(q);
    const auto it = greedy.find(row.question_id);
    eval.greedy.push_back(it == greedy.end() ? std::nullopt
                                             : std::optional<double>(it->second.first / it->second.second));
  }
  return eval;
}

std::vector<GroupSummary> summarize_groups(const Evaluation& eval, const std::vector<GroupField>& group_by) {
  auto finish = [&](std::string label, std::vector<std::size_t> rows) {
    GroupSummary g{std::move(label), std::move(rows), std::nullopt};
    double sum = 0.0;
    std::size_t count = 0;
    for (auto r : g.rows) {
      if (eval.greedy[r]) {
        sum += *eval.greedy[r];
        ++count;
      }
    }
    if (count > 0) g.greedy = sum / static_cast<double>(count);
    return g;
  };

  std::vector<GroupSummary> out;
  if (!group_by.empty()) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < eval.questions.size(); ++r) {
      std::string key;
      for (std::size_t i = 0; i < group_by.size(); ++i) {
        key += (i ? "/" : "") + group_value(*eval.questions[r], group_by[i]);
      }
      groups[key].push_back(r);
    }
    for (auto& [label, rows] : groups) out.push_back(finish(label, std::move(rows)));
  }
  std::vector<std::size_t> all(eval.questions.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  out.push_back(finish("ALL", std::move(all)));
  return out;
}

Rendered render_main_table(const Evaluation& eval, const ReportOptions& opts) {
  if (eval.report.per_question.empty()) throw std::invalid_argument("empty report");
  const auto groups = summarize_groups(eval, opts.group_by);
  Rendered out;
  for (const auto& g : groups) {
    if (!g.greedy) out.warnings.push_back("group " + g.label + ": no judged greedy records; Greedy shown as —");
  }

  auto taus = opts.grid.tau_values;
  std::sort(taus.begin(), taus.end());
  const bool has_strict = std::find(taus.begin(), taus.end(), 1.0) != taus.end();
  if (opts.include_drops && !has_strict) {
    out.warnings.push_back("drop column needs tau = 1.0 in the grid; omitted");
  }
  const bool drops = opts.include_drops && has_strict;

  Table dsv;
  std::ostringstream md;
  for (std::size_t ki = 0; ki < opts.grid.k_values.size(); ++ki) {
    const auto k = opts.grid.k_values[ki];
    // The delimited table holds every k under one header, so its labels
    // keep a literal "k".
    const bool dsv_out = opts.output_format == OutputFormat::kDelimited;
    auto label = [&](MetricKind kind, double tau) {
      return dsv_out ? generic_label(kind, tau) : MetricKey{kind, k, tau}.label();
    };
    Table t;
    if (dsv_out) t.header.push_back("k");
    t.header.push_back("Group");
    t.header.push_back("Greedy");
    if (opts.grid.include_pass_at_k) t.header.push_back(label(MetricKind::kPassAtK, 0.0));
    for (double tau : taus) t.header.push_back(label(MetricKind::kGPassAtKTau, tau));
    if (opts.grid.include_mg_pass) t.header.push_back(label(MetricKind::kMGPassAtK, 0.0));
    if (drops) t.header.push_back("Drop Greedy->" + label(MetricKind::kGPassAtKTau, 1.0));

    for (const auto& g : groups) {
      std::vector<std::string> row;
      if (opts.output_format == OutputFormat::kDelimited) row.push_back(std::to_string(k));
      row.push_back(g.label);
      row.push_back(g.greedy ? format_percent(*g.greedy * 100.0) : kDash);
      if (opts.grid.include_pass_at_k) {
        row.push_back(format_percent(100.0 * mean_metric(eval, g, {MetricKind::kPassAtK, k, 0.0})));
      }
      for (double tau : taus) {
        row.push_back(format_percent(100.0 * mean_metric(eval, g, {MetricKind::kGPassAtKTau, k, tau})));
      }
      if (opts.grid.include_mg_pass) {
        row.push_back(format_percent(100.0 * mean_metric(eval, g, {MetricKind::kMGPassAtK, k, 0.0})));
      }
      if (drops) {
        const double strict = 100.0 * mean_metric(eval, g, {MetricKind::kGPassAtKTau, k, 1.0});
        row.push_back(g.greedy ? format_percent(drop_percentage(*g.greedy * 100.0, strict)) : kDash);
      }
      t.rows.push_back(std::move(row));
    }

    if (opts.output_format == OutputFormat::kDelimited) {
      if (ki == 0) dsv.header = t.header;
      for (auto& r : t.rows) dsv.rows.push_back(std::move(r));
    } else {
      if (ki > 0) md << '\n';
      md << "k = " << k << "\n\n" << t.render(OutputFormat::kMarkdown);
    }
  }
  out.text = opts.output_format == OutputFormat::kDelimited ? dsv.render(OutputFormat::kDelimited) : md.str();
  return out;
}

Rendered render_difficulty_table(const Evaluation& eval, const ReportOptions& opts, const std::string& row_label) {
  if (eval.report.per_question.empty()) throw std::invalid_argument("empty report");
  const auto k = opts.grid.max_k();
  const MetricKey pass{MetricKind::kPassAtK, k, 0.0};
  const MetricKey strict{MetricKind::kGPassAtKTau, k, 1.0};
  eval.report.index_of(pass);
  eval.report.index_of(strict);

  auto groups = summarize_groups(eval, opts.group_by.empty() ? std::vector{GroupField::kDataset} : opts.group_by);
  Rendered out;
  Table t;
  t.header.push_back("Model");
  std::vector<std::string> row{row_label};
  for (const auto& g : groups) {
    if (!g.greedy) out.warnings.push_back("group " + g.label + ": no judged greedy records; Greedy shown as —");
    const double p = 100.0 * mean_metric(eval, g, pass);
    const double s = 100.0 * mean_metric(eval, g, strict);
    t.header.push_back(g.label + " " + pass.label());
    t.header.push_back(g.label + " Greedy (drop)");
    t.header.push_back(g.label + " " + strict.label() + " (drop)");
    row.push_back(format_percent(p));
    if (g.greedy) {
      const double greedy = *g.greedy * 100.0;
      row.push_back(format_percent(greedy) + " (↓" + format_percent(drop_percentage(p, greedy)) + ")");
      row.push_back(format_percent(s) + " (↓" + format_percent(drop_percentage(greedy, s)) + ")");
    } else {
      row.push_back(kDash);
      row.push_back(format_percent(s) + " (↓" + kDash + ")");
    }
  }
  t.rows.push_back(std::move(row));
  out.text = t.render(opts.output_format);
  return out;
}

Rendered render_slope_table(const Evaluation& eval, const ReportOptions& opts) {
  const auto k = opts.grid.max_k();
  auto taus = opts.grid.tau_values;
  std::sort(taus.begin(), taus.end());
  Rendered out;
  if (taus.size() < 2) {
    out.warnings.push_back("tau slope needs at least two tau values; skipped");
    return out;
  }
  Table t;
  t.header = {"Group", "slope G-Pass@" + std::to_string(k) + "_tau"};
  for (double tau : taus) t.header.push_back("tau=" + tau_text(tau));
  for (const auto& g : summarize_groups(eval, opts.group_by)) {
    std::vector<std::pair<double, double>> pts;
    for (double tau : taus) pts.emplace_back(tau, mean_metric(eval, g, {MetricKind::kGPassAtKTau, k, tau}));
    const auto s = tau_slope(pts, g.label);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", s.slope);
    std::vector<std::string> row{g.label, buf};
    for (double v : s.values) row.push_back(format_percent(100.0 * v));
    t.rows.push_back(std::move(row));
  }
  out.text = t.render(opts.output_format);
  return out;
}

}  // namespace gpass
