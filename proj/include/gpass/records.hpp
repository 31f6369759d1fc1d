#pragma once

#include "gpass/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpass {

enum class Language { kEn, kCn };
enum class QuestionType { kFillInTheBlank, kProblemSolving };
enum class RunKind { kSampled, kGreedy };

std::string to_string(Language v);
std::string to_string(QuestionType v);
std::string to_string(RunKind v);
std::optional<Language> parse_language(const std::string& s);
std::optional<QuestionType> parse_question_type(const std::string& s);
std::optional<RunKind> parse_run_kind(const std::string& s);

struct QuestionRecord {
  std::string question_id;
  std::string dataset;
  Language language = Language::kEn;
  QuestionType question_type = QuestionType::kProblemSolving;
  std::string prompt;
  std::string reference_answer;
};

struct GenerationRecord {
  std::string question_id;
  std::int64_t run_index = 0;
  RunKind run_kind = RunKind::kSampled;
  std::string completion;
  std::optional<bool> judged_correct;
  std::optional<std::string> judge_raw;
};

struct ValidationIssue {
  enum class Severity { kError, kWarning };

  Severity severity = Severity::kError;
  std::optional<std::string> question_id;
  std::optional<std::size_t> line;  // 1-based
  std::string message;

  std::string to_string() const;
};

using Issues = std::vector<ValidationIssue>;

bool has_errors(const Issues& issues);

/// Thrown when an input file cannot be opened or read.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuestionSet {
  std::vector<QuestionRecord> records;
  Issues issues;

  const QuestionRecord* find(const std::string& question_id) const;
};

struct GenerationSet {
  std::vector<GenerationRecord> records;
  Issues issues;
};

struct TallyResult {
  TallySet tallies;
  Issues issues;
};

/// Parses a line-delimited question file. Malformed lines and duplicate ids
/// become error issues tagged with their line number; a file with no valid
/// record yields the error "zero valid records".
QuestionSet load_question_set(const std::filesystem::path& path);
QuestionSet parse_question_set(std::string_view text);

/// Parses a line-delimited generation file against a question set.
GenerationSet load_generations(const std::filesystem::path& path, const QuestionSet& questions);
GenerationSet parse_generations(std::string_view text, const QuestionSet& questions);

/// Per-question (n, c) over sampled records only, in first-appearance order.
/// Errors: unjudged sampled record, n < k_max, non-contiguous run indices.
/// Warning: n < 3 * k_max.
TallyResult tally(const std::vector<GenerationRecord>& generations, std::int64_t k_max);

// Canonical form: compact JSON, fields in declaration order, absent optionals omitted.
std::string to_json_line(const QuestionRecord& r);
std::string to_json_line(const GenerationRecord& r);

}  // namespace gpass
