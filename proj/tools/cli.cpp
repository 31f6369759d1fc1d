#include "cli.hpp"

#include "gpass/judge.hpp"
#include "gpass/metrics.hpp"
#include "gpass/records.hpp"
#include "gpass/report.hpp"
#include "gpass/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace gpass::cli {
namespace {

void print_issues(const Issues& issues, const std::string& source) {
  for (const auto& i : issues) std::cerr << source << ": " << i.to_string() << '\n';
}

// Writes to --out when given, otherwise stdout.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError("cannot write " + out_path);
  out << text;
}

struct JudgeArgs {
  std::string questions, generations, out, verdicts_out;
  JudgeConfig cfg;
  std::string cache;
  bool rejudge = false;
};

int cmd_judge(JudgeArgs& a) {
  const auto qs = load_question_set(a.questions);
  print_issues(qs.issues, a.questions);
  if (has_errors(qs.issues)) return kDataError;
  auto gens = load_generations(a.generations, qs);
  print_issues(gens.issues, a.generations);
  if (has_errors(gens.issues)) return kDataError;

  a.cfg.cache_path = a.cache;
  if (const char* key = std::getenv("GPASS_JUDGE_API_KEY")) a.cfg.api_key = key;

  std::vector<GenerationRecord> pending;
  for (const auto& r : gens.records) {
    if (a.rejudge || !r.judged_correct) pending.push_back(r);
  }
  JudgeBatchResult result;
  try {
    result = judge_batch(pending, qs, a.cfg);
  } catch (const JudgeBatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& id : e.outstanding()) std::cerr << "  outstanding: " << id << '\n';
    return kDataError;
  }
  apply_verdicts(gens.records, result.verdicts);

  std::string text;
  for (const auto& r : gens.records) text += to_json_line(r) + '\n';
  emit(a.out, text);
  if (!a.verdicts_out.empty()) {
    std::string vtext;
    for (const auto& v : result.verdicts) vtext += to_json_line(v) + '\n';
    emit(a.verdicts_out, vtext);
  }
  std::int64_t unparseable = 0;
  for (const auto& v : result.verdicts) unparseable += v.verdict == Verdict::kUnparseable ? 1 : 0;
  std::cerr << "judged " << result.verdicts.size() << " records (" << result.network_calls
            << " requests, " << result.cache_hits << " cache hits, " << unparseable
            << " unparseable counted as incorrect)\n";
  return kOk;
}

struct ComputeArgs {
  std::string questions, generations, out, model_name = "model";
  std::vector<std::int64_t> k{4, 8, 16};
  std::vector<double> tau{0.25, 0.5, 0.75, 1.0};
  std::vector<std::string> group_by;
  std::string format = "markdown";
  bool drops = false, slope = false, difficulty = false, no_pass = false, no_mg = false;
  unsigned threads = 1;
  std::string timestamp;
};

int cmd_compute(ComputeArgs& a) {
  ReportOptions opts;
  opts.grid.k_values = a.k;
  opts.grid.tau_values = a.tau;
  opts.grid.include_pass_at_k = !a.no_pass;
  opts.grid.include_mg_pass = !a.no_mg;
  opts.output_format = a.format == "dsv" ? OutputFormat::kDelimited : OutputFormat::kMarkdown;
  opts.include_drops = a.drops;
  opts.include_slope = a.slope;
  for (const auto& g : a.group_by) opts.group_by.push_back(*parse_group_field(g));
  try {
    opts.grid.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  const auto qs = load_question_set(a.questions);
  print_issues(qs.issues, a.questions);
  if (has_errors(qs.issues)) return kDataError;
  const auto gens = load_generations(a.generations, qs);
  print_issues(gens.issues, a.generations);
  if (has_errors(gens.issues)) return kDataError;
  const auto tallied = tally(gens.records, opts.grid.max_k());
  print_issues(tallied.issues, a.generations);
  if (has_errors(tallied.issues)) return kDataError;
  if (tallied.tallies.empty()) {
    std::cerr << a.generations << ": error: no sampled generations\n";
    return kDataError;
  }

  auto report = compute_report(tallied.tallies, opts.grid, {a.threads, a.timestamp});
  auto eval = make_evaluation(std::move(report), qs, gens.records);

  std::vector<Rendered> parts;
  parts.push_back(render_main_table(eval, opts));
  if (a.difficulty) parts.push_back(render_difficulty_table(eval, opts, a.model_name));
  if (a.slope) parts.push_back(render_slope_table(eval, opts));

  std::string text;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0 && !parts[i].text.empty()) text += '\n';
    text += parts[i].text;
    for (const auto& w : parts[i].warnings) std::cerr << "warning: " << w << '\n';
  }
  emit(a.out, text);
  return kOk;
}

struct SimArgs {
  SimConfig cfg;
  std::string out;
};

struct CurveArgs {
  std::int64_t n = 80;
  std::vector<std::int64_t> c{8, 16, 24, 32};
  std::int64_t k_max = 0;  // 0 -> n
  std::vector<double> tau{0.25, 0.5, 0.75, 1.0};
  std::string out;
};

int cmd_agreement(const std::string& a_path, const std::string& b_path) {
  const auto a = load_verdicts(a_path);
  const auto b = load_verdicts(b_path);
  Agreement r;
  try {
    r = agreement_rate(a, b);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  std::cout << "| Agreement | Disagreement | Accuracy (%) |\n|---:|---:|---:|\n| " << r.agreements << " | "
            << r.disagreements << " | " << format_percent(r.accuracy) << " |\n";
  return kOk;
}

void add_sim_options(CLI::App* sub, SimArgs& s) {
  sub->add_option("--p-star", s.cfg.p_star, "True per-run success probability")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--k", s.cfg.k, "Draw count k")->check(CLI::PositiveNumber);
  sub->add_option("--n", s.cfg.n_values, "Comma-separated n values")->delimiter(',');
  sub->add_option("--tau", s.cfg.tau_values, "Comma-separated tau values")->delimiter(',');
  sub->add_option("--trials", s.cfg.trials, "Monte Carlo repetitions")->check(CLI::PositiveNumber);
  sub->add_option("--seed", s.cfg.seed, "RNG seed");
  sub->add_option("--threads", s.cfg.threads, "Worker threads (results do not depend on this)");
  sub->add_option("--out", s.out, "Output file (default: standard output)");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Stability-aware pass metrics: judging, scoring and estimator studies", "gpass"};
  app.set_version_flag("--version", std::string("gpass ") + GPASS_VERSION);
  app.require_subcommand(1);

  JudgeArgs judge;
  auto* judge_cmd = app.add_subcommand("judge", "Grade a generations file with an LLM judge endpoint");
  judge_cmd->add_option("--questions", judge.questions, "Question set (JSONL)")->required()->check(CLI::ExistingFile);
  judge_cmd->add_option("--generations", judge.generations, "Generations (JSONL)")->required()->check(CLI::ExistingFile);
  judge_cmd->add_option("--out", judge.out, "Judged generations output (JSONL)")->required();
  judge_cmd->add_option("--verdicts", judge.verdicts_out, "Also write one verdict per line here");
  judge_cmd->add_option("--judge-url", judge.cfg.endpoint_url, "Chat-completion endpoint URL")->required();
  judge_cmd->add_option("--judge-model", judge.cfg.model_name, "Judge model name")->required();
  judge_cmd->add_option("--max-parallel", judge.cfg.max_parallel_requests, "Concurrent requests")
      ->check(CLI::PositiveNumber);
  judge_cmd->add_option("--retries", judge.cfg.retry_limit, "Retries per input")->check(CLI::NonNegativeNumber);
  judge_cmd->add_option("--cache", judge.cache, "Verdict cache file (append-only JSONL)");
  judge_cmd->add_option("--temperature", judge.cfg.temperature, "Judge sampling temperature")
      ->check(CLI::NonNegativeNumber);
  judge_cmd->add_option("--max-tokens", judge.cfg.max_output_tokens, "Judge max output tokens")
      ->check(CLI::PositiveNumber);
  judge_cmd->add_option("--backoff-ms", judge.cfg.retry_backoff_ms, "Base retry backoff in milliseconds")
      ->check(CLI::NonNegativeNumber);
  judge_cmd->add_flag("--rejudge", judge.rejudge, "Judge records that already carry a verdict");

  ComputeArgs compute;
  auto* compute_cmd = app.add_subcommand("compute", "Tally judged generations and render metric tables");
  compute_cmd->add_option("--questions", compute.questions, "Question set (JSONL)")->required()->check(CLI::ExistingFile);
  compute_cmd->add_option("--generations", compute.generations, "Judged generations (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  compute_cmd->add_option("--k", compute.k, "Comma-separated k values, ascending")->delimiter(',');
  compute_cmd->add_option("--tau", compute.tau, "Comma-separated tau values in (0,1]")->delimiter(',');
  compute_cmd->add_option("--group-by", compute.group_by, "dataset, language and/or question_type")
      ->delimiter(',')
      ->check(CLI::IsMember({"dataset", "language", "question_type"}));
  compute_cmd->add_option("--format", compute.format, "markdown or dsv")->check(CLI::IsMember({"markdown", "dsv"}));
  compute_cmd->add_flag("--drops", compute.drops, "Add the Greedy -> G-Pass@k_1.0 drop column");
  compute_cmd->add_flag("--slope", compute.slope, "Add the tau-slope table");
  compute_cmd->add_flag("--difficulty", compute.difficulty, "Add the per-group difficulty table");
  compute_cmd->add_flag("--no-pass-at-k", compute.no_pass, "Omit the Pass@k column");
  compute_cmd->add_flag("--no-mg", compute.no_mg, "Omit the mG-Pass@k column");
  compute_cmd->add_option("--model-name", compute.model_name, "Row label for the difficulty table");
  compute_cmd->add_option("--threads", compute.threads, "Worker threads (output does not depend on this)");
  compute_cmd->add_option("--out", compute.out, "Output file (default: standard output)");

  auto* sim_cmd = app.add_subcommand("simulate", "Estimator studies with synthetic binomial data");
  sim_cmd->require_subcommand(1);
  SimArgs unbiased;
  auto* unbiased_cmd = sim_cmd->add_subcommand("unbiasedness", "Estimator mean/std vs. exact expectation");
  add_sim_options(unbiased_cmd, unbiased);
  SimArgs variance;
  auto* variance_cmd = sim_cmd->add_subcommand("variance", "Estimator std as a function of n");
  add_sim_options(variance_cmd, variance);
  CurveArgs curves;
  auto* curves_cmd = sim_cmd->add_subcommand("curves", "Pass@k vs. G-Pass@k_tau curves at fixed n");
  curves_cmd->add_option("--n", curves.n, "Generations per question")->check(CLI::PositiveNumber);
  curves_cmd->add_option("--c", curves.c, "Comma-separated correct counts")->delimiter(',');
  curves_cmd->add_option("--k-max", curves.k_max, "Largest k (default: n)");
  curves_cmd->add_option("--tau", curves.tau, "Comma-separated tau values")->delimiter(',');
  curves_cmd->add_option("--out", curves.out, "Output file (default: standard output)");

  std::string agree_a, agree_b;
  auto* agree_cmd = app.add_subcommand("agreement", "Agreement rate between two verdict files");
  agree_cmd->add_option("a", agree_a, "First verdict file")->required()->check(CLI::ExistingFile);
  agree_cmd->add_option("b", agree_b, "Second verdict file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*judge_cmd) return cmd_judge(judge);
    if (*compute_cmd) return cmd_compute(compute);
    if (*unbiased_cmd) {
      std::ostringstream os;
      write_study(os, run_unbiasedness_study(unbiased.cfg));
      emit(unbiased.out, os.str());
      return kOk;
    }
    if (*variance_cmd) {
      std::ostringstream os;
      write_variance(os, variance.cfg.k, variance_vs_n(variance.cfg));
      emit(variance.out, os.str());
      return kOk;
    }
    if (*curves_cmd) {
      std::ostringstream os;
      write_curves(os, emit_comparison_curves(curves.n, curves.c, curves.k_max == 0 ? curves.n : curves.k_max,
                                              curves.tau));
      emit(curves.out, os.str());
      return kOk;
    }
    if (*agree_cmd) return cmd_agreement(agree_a, agree_b);
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace gpass::cli
