#pragma once

#include "gpass/records.hpp"

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gpass {

enum class Verdict { kYes, kNo, kUnparseable };

std::string to_string(Verdict v);
std::optional<Verdict> parse_verdict_name(const std::string& s);

/// Raw prompt template for a language, with {question}, {reference_answer}
/// and {candidate_answer} placeholders. Embedded from templates/ at build time.
std::string_view judge_template(Language language);

/// Substitutes the three placeholders in a single left-to-right pass;
/// inserted text is never re-scanned. Throws std::invalid_argument on empty input.
std::string render_judge_prompt(std::string_view question, std::string_view reference_answer,
                                std::string_view candidate_answer, Language language);

/// Verdict from the last boxed{...} in `raw`: "yes" / "no" after trimming,
/// anything else (or no box at all) is unparseable.
Verdict parse_verdict(std::string_view raw);

/// Hex SHA-256 over the length-prefixed judging inputs.
std::string judge_cache_key(std::string_view question, std::string_view reference_answer,
                            std::string_view candidate_answer, std::string_view model_name,
                            Language language);

struct JudgeConfig {
  std::string endpoint_url;  // e.g. http://127.0.0.1:8000/v1/chat/completions
  std::string model_name;
  std::string api_key;  // sent as a bearer token when non-empty
  double temperature = 0.0;
  std::int64_t max_output_tokens = 8192;
  std::int64_t max_parallel_requests = 4;
  std::int64_t retry_limit = 2;
  std::filesystem::path cache_path;  // empty disables the on-disk cache
  std::int64_t retry_backoff_ms = 250;
  std::int64_t connect_timeout_s = 10;
  std::int64_t read_timeout_s = 600;

  void validate() const;
};

struct JudgeVerdict {
  std::string question_id;
  RunKind run_kind = RunKind::kSampled;
  std::int64_t run_index = 0;
  Verdict verdict = Verdict::kUnparseable;
  std::string raw_text;
  std::string cache_key;

  bool correct() const { return verdict == Verdict::kYes; }
};

/// Append-only verdict cache: one {"cache_key","verdict","raw_text"} object per line.
/// Appends are serialized and flushed per entry.
class VerdictCache {
 public:
  struct Entry {
    Verdict verdict = Verdict::kUnparseable;
    std::string raw_text;
  };

  VerdictCache() = default;
  /// Loads existing entries; unreadable trailing lines are skipped.
  explicit VerdictCache(std::filesystem::path path);

  std::optional<Entry> lookup(const std::string& key) const;
  void store(const std::string& key, const Entry& entry);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Entry> entries_;
};

/// Raised when the endpoint stays unreachable after retries. Completed
/// verdicts are already in the cache, so rerunning the batch resumes.
class JudgeBatchError : public std::runtime_error {
 public:
  JudgeBatchError(const std::string& what, std::vector<std::string> outstanding)
      : std::runtime_error(what), outstanding_(std::move(outstanding)) {}
  const std::vector<std::string>& outstanding() const { return outstanding_; }

 private:
  std::vector<std::string> outstanding_;
};

struct JudgeBatchResult {
  std::vector<JudgeVerdict> verdicts;  // sorted by (question_id, run_kind, run_index)
  std::int64_t network_calls = 0;
  std::int64_t cache_hits = 0;
};

/// Grades every record against its question's reference answer. Inputs with
/// the same cache key are judged once; cached keys cost no request.
JudgeBatchResult judge_batch(const std::vector<GenerationRecord>& records, const QuestionSet& questions,
                             const JudgeConfig& cfg);

/// Fills judged_correct (yes -> true, otherwise false) and judge_raw.
void apply_verdicts(std::vector<GenerationRecord>& records, const std::vector<JudgeVerdict>& verdicts);

struct Agreement {
  std::int64_t agreements = 0;
  std::int64_t disagreements = 0;
  double accuracy = 0.0;  // percent
};

/// Compares judged correctness key by key; both lists must cover the same
/// (question_id, run_kind, run_index) keys.
Agreement agreement_rate(const std::vector<JudgeVerdict>& a, const std::vector<JudgeVerdict>& b);

std::string to_json_line(const JudgeVerdict& v);
/// Reads a verdict file. Lines may carry "verdict" or, as in judged generation
/// files, "judged_correct".
std::vector<JudgeVerdict> load_verdicts(const std::filesystem::path& path);

}  // namespace gpass
