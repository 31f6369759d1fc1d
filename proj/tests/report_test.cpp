#include "gpass/exact_oracle.hpp"
#include "gpass/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace gpass {
namespace {

TEST(DropPercentage, PublishedExamples) {
  EXPECT_NEAR(*drop_percentage(18.1, 0.8), 95.6, 0.2);
  EXPECT_EQ(format_percent(drop_percentage(18.1, 0.8)), "95.6");
  EXPECT_NEAR(*drop_percentage(34.5, 3.7), 89.3, 0.2);
  EXPECT_EQ(format_percent(drop_percentage(34.5, 3.7)), "89.3");
  // Printed as 86.0 from unrounded inputs; 65.9 -> 9.1 gives 86.19.
  EXPECT_NEAR(*drop_percentage(65.9, 9.1), 86.0, 0.2);
  EXPECT_EQ(*drop_percentage(42.0, 42.0), 0.0);
  EXPECT_FALSE(drop_percentage(0.0, 0.0).has_value());
  EXPECT_EQ(format_percent(drop_percentage(0.0, 1.0)), "—");
}

TEST(FormatPercent, RoundingAndTinyValues) {
  EXPECT_EQ(format_percent(0.0), "0.0");
  EXPECT_EQ(format_percent(0.04), "~0.0");
  EXPECT_EQ(format_percent(0.05), "~0.0");  // 0.5 tenths ties to even
  EXPECT_EQ(format_percent(0.051), "0.1");
  EXPECT_EQ(format_percent(-0.0), "0.0");
  EXPECT_EQ(format_percent(100.0), "100.0");
  EXPECT_EQ(format_percent(12.25), "12.2");  // exact tie, half-even
  EXPECT_EQ(format_percent(12.75), "12.8");
  EXPECT_EQ(format_percent(98.6666666), "98.7");
}

TEST(TauSlope, Examples) {
  EXPECT_EQ(tau_slope({{0.25, 0.5}, {0.5, 0.5}, {0.75, 0.5}, {1.0, 0.5}}).slope, 0.0);
  EXPECT_DOUBLE_EQ(tau_slope({{0.0, 1.0}, {1.0, 0.0}}).slope, -1.0);
  EXPECT_THROW(tau_slope({{0.5, 1.0}}), std::invalid_argument);
  EXPECT_THROW(tau_slope({{0.5, 1.0}, {0.5, 0.2}}), std::invalid_argument);
}

TEST(TauSlope, ConstantSeriesIsExactlyZero) {
  for (double v : {0.1, 0.3, 1.0 / 3.0, 0.7000000000000001}) {
    EXPECT_EQ(tau_slope({{0.25, v}, {0.5, v}, {0.75, v}, {1.0, v}, {0.3, v}}).slope, 0.0);
  }
}

TEST(TauSlope, ShiftInvariant) {
  const std::vector<std::pair<double, double>> pts{{0.25, 0.9}, {0.5, 0.6}, {0.75, 0.2}, {1.0, 0.05}};
  auto shifted = pts;
  for (auto& p : shifted) p.second += 0.37;
  EXPECT_NEAR(tau_slope(pts).slope, tau_slope(shifted).slope, 1e-14);
}

TEST(TauSlope, OracleCurveForHalfCorrect) {
  // Points from exact tails of (n=48, c=24, k=16), OLS slope evaluated in rationals.
  std::vector<std::pair<double, double>> pts;
  for (auto [tau, j] : {std::pair{0.25, 4}, {0.5, 8}, {0.75, 12}, {1.0, 16}}) {
    pts.emplace_back(tau, exact::to_double(exact::tail(48, 24, 16, j)));
  }
  EXPECT_NEAR(tau_slope(pts).slope, -1.4388885935210503, 1e-13);
  std::vector<std::pair<double, double>> from_kernel;
  for (double tau : {0.25, 0.5, 0.75, 1.0}) from_kernel.emplace_back(tau, g_pass_at_k_tau(48, 24, 16, tau));
  EXPECT_NEAR(tau_slope(from_kernel).slope, -1.4388885935210503, 1e-12);
}

QuestionSet questions() {
  QuestionSet qs;
  qs.records.push_back({"a1", "AMC", Language::kEn, QuestionType::kProblemSolving, "p", "r"});
  qs.records.push_back({"a2", "AMC", Language::kCn, QuestionType::kProblemSolving, "p", "r"});
  qs.records.push_back({"w1", "WLPMC", Language::kEn, QuestionType::kFillInTheBlank, "p", "r"});
  return qs;
}

Evaluation evaluation(const TallySet& tallies, const std::vector<GenerationRecord>& greedy,
                      const MetricGrid& grid = MetricGrid{}) {
  return make_evaluation(compute_report(tallies, grid, {1, "fixed"}), questions(), greedy);
}

TEST(MainTable, FullyCorrectQuestionIsAllHundreds) {
  ReportOptions opts;
  opts.grid.k_values = {16};
  QuestionSet qs = questions();
  auto eval = make_evaluation(compute_report({{"a1", 48, 48}}, opts.grid, {1, "t"}), qs,
                              {{"a1", 0, RunKind::kGreedy, "x", true, std::nullopt}});
  const auto r = render_main_table(eval, opts);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.text,
            "k = 16\n\n"
            "| Group | Greedy | G-Pass@16_{->0} | G-Pass@16_{0.25} | G-Pass@16_{0.5} | G-Pass@16_{0.75} | "
            "G-Pass@16_{1} | mG-Pass@16 |\n"
            "|---|---:|---:|---:|---:|---:|---:|---:|\n"
            "| ALL | 100.0 | 100.0 | 100.0 | 100.0 | 100.0 | 100.0 | 100.0 |\n");
}

TEST(MainTable, GroupsThenAllRowUsingQuestionMean) {
  ReportOptions opts;
  opts.grid = MetricGrid{{16}, {1.0}, true, false};
  opts.group_by = {GroupField::kDataset};
  opts.output_format = OutputFormat::kDelimited;
  // AMC: two questions at 100%, WLPMC: one at 0%. Mean of group means would be 50%.
  const auto eval = evaluation({{"a1", 48, 48}, {"a2", 48, 48}, {"w1", 48, 0}},
                               {{"a1", 0, RunKind::kGreedy, "x", true, std::nullopt},
                                {"w1", 0, RunKind::kGreedy, "x", false, std::nullopt}},
                               opts.grid);
  const auto r = render_main_table(eval, opts);
  EXPECT_EQ(r.text,
            "k,Group,Greedy,G-Pass@k_{->0},G-Pass@k_{1}\n"
            "16,AMC,100.0,100.0,100.0\n"
            "16,WLPMC,0.0,0.0,0.0\n"
            "16,ALL,50.0,66.7,66.7\n");
}

TEST(MainTable, MissingGreedyIsDashWithWarning) {
  ReportOptions opts;
  opts.grid = MetricGrid{{4}, {0.5}, true, true};
  opts.output_format = OutputFormat::kDelimited;
  const auto r = render_main_table(evaluation({{"a1", 12, 6}}, {}, opts.grid), opts);
  EXPECT_NE(r.text.find("ALL,—,"), std::string::npos);
  ASSERT_EQ(r.warnings.size(), 1u);
}

TEST(MainTable, ColumnOrderAndDrops) {
  ReportOptions opts;
  opts.grid = MetricGrid{{16}, {1.0, 0.25, 0.75, 0.5}, true, true};
  opts.include_drops = true;
  opts.output_format = OutputFormat::kDelimited;
  const auto r = render_main_table(
      evaluation({{"a1", 48, 30}}, {{"a1", 0, RunKind::kGreedy, "x", true, std::nullopt}}, opts.grid), opts);
  const auto header = r.text.substr(0, r.text.find('\n'));
  EXPECT_EQ(header,
            "k,Group,Greedy,G-Pass@k_{->0},G-Pass@k_{0.25},G-Pass@k_{0.5},G-Pass@k_{0.75},G-Pass@k_{1},"
            "mG-Pass@k,Drop Greedy->G-Pass@k_{1}");
  const double strict = 100.0 * g_pass_at_k(48, 30, 16);
  EXPECT_TRUE(r.text.ends_with("," + format_percent(drop_percentage(100.0, strict)) + "\n"));
}

TEST(MainTable, DeterministicRendering) {
  ReportOptions opts;
  opts.group_by = {GroupField::kLanguage, GroupField::kQuestionType};
  const TallySet t{{"a1", 48, 17}, {"a2", 48, 40}, {"w1", 48, 3}};
  EXPECT_EQ(render_main_table(evaluation(t, {}), opts).text, render_main_table(evaluation(t, {}), opts).text);
  const auto text = render_main_table(evaluation(t, {}), opts).text;
  EXPECT_NE(text.find("| cn/problem-solving |"), std::string::npos);
  EXPECT_NE(text.find("| en/fill-in-the-blank |"), std::string::npos);
  EXPECT_LT(text.find("| cn/problem-solving |"), text.find("| en/fill-in-the-blank |"));
}

TEST(MainTable, DelimitedHeaderCoversEveryK) {
  ReportOptions opts;
  opts.grid = MetricGrid{{4, 8}, {0.5}, true, true};
  opts.output_format = OutputFormat::kDelimited;
  const auto r = render_main_table(evaluation({{"a1", 12, 6}}, {}, opts.grid), opts);
  EXPECT_TRUE(r.text.starts_with("k,Group,Greedy,G-Pass@k_{->0},G-Pass@k_{0.5},mG-Pass@k\n4,ALL,"));
  EXPECT_NE(r.text.find("\n8,ALL,"), std::string::npos);
  EXPECT_EQ(std::count(r.text.begin(), r.text.end(), '\n'), 3);
}

TEST(DifficultyTable, ThreeColumnsPerGroup) {
  ReportOptions opts;
  opts.grid = MetricGrid{{16}, {1.0}, true, false};
  opts.output_format = OutputFormat::kDelimited;
  const auto eval = evaluation({{"a1", 48, 48}, {"a2", 48, 24}, {"w1", 48, 10}},
                               {{"a1", 0, RunKind::kGreedy, "x", true, std::nullopt},
                                {"a2", 0, RunKind::kGreedy, "x", false, std::nullopt},
                                {"w1", 0, RunKind::kGreedy, "x", false, std::nullopt}},
                               opts.grid);
  const auto r = render_difficulty_table(eval, opts, "demo");
  const double amc_pass = 100.0 * (1.0 + pass_at_k(48, 24, 16)) / 2.0;
  const double amc_strict = 100.0 * (1.0 + g_pass_at_k(48, 24, 16)) / 2.0;
  const std::string expected_amc = format_percent(amc_pass) + ",50.0 (↓" +
                                   format_percent(drop_percentage(amc_pass, 50.0)) + ")," +
                                   format_percent(amc_strict) + " (↓" +
                                   format_percent(drop_percentage(50.0, amc_strict)) + ")";
  EXPECT_NE(r.text.find("demo," + expected_amc + ","), std::string::npos) << r.text;
  // WLPMC greedy is 0: the second drop has no baseline.
  EXPECT_NE(r.text.find(",0.0 (↓100.0),0.0 (↓—),"), std::string::npos) << r.text;
  EXPECT_TRUE(r.text.starts_with(
      "Model,AMC G-Pass@16_{->0},AMC Greedy (drop),AMC G-Pass@16_{1} (drop),WLPMC G-Pass@16_{->0},"));
}

TEST(DifficultyTable, EqualGreedyAndPassGivesZeroDrop) {
  ReportOptions opts;
  opts.grid = MetricGrid{{16}, {1.0}, true, false};
  opts.output_format = OutputFormat::kDelimited;
  const auto eval = evaluation({{"w1", 48, 48}}, {{"w1", 0, RunKind::kGreedy, "x", true, std::nullopt}}, opts.grid);
  EXPECT_NE(render_difficulty_table(eval, opts).text.find("100.0,100.0 (↓0.0),100.0 (↓0.0)"), std::string::npos);
}

TEST(SlopeTable, UsesReportTauGrid) {
  ReportOptions opts;
  opts.grid = MetricGrid{{16}, {0.25, 0.5, 0.75, 1.0}, true, true};
  opts.output_format = OutputFormat::kDelimited;
  const auto r = render_slope_table(evaluation({{"a1", 48, 24}}, {}, opts.grid), opts);
  EXPECT_NE(r.text.find("ALL,-1.4389,"), std::string::npos) << r.text;

  opts.grid.tau_values = {0.5};
  EXPECT_EQ(render_slope_table(evaluation({{"a1", 48, 24}}, {}, opts.grid), opts).warnings.size(), 1u);
}

TEST(Greedy, MultipleRunsAreAveraged) {
  ReportOptions opts;
  opts.grid = MetricGrid{{4}, {1.0}, false, false};
  opts.output_format = OutputFormat::kDelimited;
  std::vector<GenerationRecord> greedy;
  for (int i = 0; i < 20; ++i) greedy.push_back({"a1", i, RunKind::kGreedy, "x", i < 5, std::nullopt});
  const auto r = render_main_table(evaluation({{"a1", 12, 6}}, greedy, opts.grid), opts);
  EXPECT_NE(r.text.find("4,ALL,25.0,"), std::string::npos) << r.text;
}

}  // namespace
}  // namespace gpass
