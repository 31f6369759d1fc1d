#include "gpass/records.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace gpass {
namespace {

using nlohmann::json;
using Severity = ValidationIssue::Severity;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IngestError("failed reading " + path.string());
  return ss.str();
}

// Calls fn(line_number, line) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    fn(line_no, line);
  }
}

std::string quoted(const std::string& s) {
  return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string required_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FieldError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw FieldError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

template <typename Enum>
Enum required_enum(const json& obj, const char* key, std::optional<Enum> (*parse)(const std::string&)) {
  const auto s = required_string(obj, key);
  const auto v = parse(s);
  if (!v) throw FieldError(std::string("field '") + key + "' has unknown value \"" + s + "\"");
  return *v;
}

QuestionRecord parse_question(const json& obj) {
  if (!obj.is_object()) throw FieldError("record is not an object");
  QuestionRecord r;
  r.question_id = required_string(obj, "question_id");
  if (r.question_id.empty()) throw FieldError("empty question_id");
  r.dataset = required_string(obj, "dataset");
  r.language = required_enum(obj, "language", &parse_language);
  r.question_type = required_enum(obj, "question_type", &parse_question_type);
  r.prompt = required_string(obj, "prompt");
  r.reference_answer = required_string(obj, "reference_answer");
  return r;
}

GenerationRecord parse_generation(const json& obj) {
  if (!obj.is_object()) throw FieldError("record is not an object");
  GenerationRecord r;
  r.question_id = required_string(obj, "question_id");
  const auto idx = obj.find("run_index");
  if (idx == obj.end()) throw FieldError("missing field 'run_index'");
  if (!idx->is_number_integer() || idx->get<std::int64_t>() < 0) {
    throw FieldError("field 'run_index' must be a non-negative integer");
  }
  r.run_index = idx->get<std::int64_t>();
  r.run_kind = required_enum(obj, "run_kind", &parse_run_kind);
  r.completion = required_string(obj, "completion");
  if (const auto it = obj.find("judged_correct"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) throw FieldError("field 'judged_correct' must be a boolean");
    r.judged_correct = it->get<bool>();
  }
  if (const auto it = obj.find("judge_raw"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw FieldError("field 'judge_raw' must be a string");
    r.judge_raw = it->get<std::string>();
  }
  return r;
}

ValidationIssue issue(Severity s, std::optional<std::string> qid, std::optional<std::size_t> line,
                      std::string message) {
  return {s, std::move(qid), line, std::move(message)};
}

}  // namespace

std::string to_string(Language v) { return v == Language::kEn ? "en" : "cn"; }

std::string to_string(QuestionType v) {
  return v == QuestionType::kFillInTheBlank ? "fill-in-the-blank" : "problem-solving";
}

std::string to_string(RunKind v) { return v == RunKind::kSampled ? "sampled" : "greedy"; }

std::optional<Language> parse_language(const std::string& s) {
  if (s == "en") return Language::kEn;
  if (s == "cn") return Language::kCn;
  return std::nullopt;
}

std::optional<QuestionType> parse_question_type(const std::string& s) {
  if (s == "fill-in-the-blank") return QuestionType::kFillInTheBlank;
  if (s == "problem-solving") return QuestionType::kProblemSolving;
  return std::nullopt;
}

std::optional<RunKind> parse_run_kind(const std::string& s) {
  if (s == "sampled") return RunKind::kSampled;
  if (s == "greedy") return RunKind::kGreedy;
  return std::nullopt;
}

std::string ValidationIssue::to_string() const {
  std::string out = severity == Severity::kError ? "error" : "warning";
  if (line) out += ": line " + std::to_string(*line);
  if (question_id) out += ": question " + *question_id;
  return out + ": " + message;
}

bool has_errors(const Issues& issues) {
  return std::any_of(issues.begin(), issues.end(),
                     [](const ValidationIssue& i) { return i.severity == Severity::kError; });
}

const QuestionRecord* QuestionSet::find(const std::string& question_id) const {
  const auto it = std::find_if(records.begin(), records.end(),
                               [&](const QuestionRecord& r) { return r.question_id == question_id; });
  return it == records.end() ? nullptr : &*it;
}

QuestionSet parse_question_set(std::string_view text) {
  QuestionSet out;
  std::unordered_set<std::string> ids;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    try {
      auto rec = parse_question(json::parse(line));
      if (!ids.insert(rec.question_id).second) {
        out.issues.push_back(issue(Severity::kError, rec.question_id, line_no,
                                   "duplicate question_id \"" + rec.question_id + "\""));
        return;
      }
      out.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      out.issues.push_back(issue(Severity::kError, std::nullopt, line_no,
                                 std::string("malformed JSON: ") + e.what()));
    } catch (const FieldError& e) {
      out.issues.push_back(issue(Severity::kError, std::nullopt, line_no, e.what()));
    }
  });
  if (out.records.empty()) {
    out.issues.push_back(issue(Severity::kError, std::nullopt, std::nullopt, "zero valid records"));
  }
  return out;
}

QuestionSet load_question_set(const std::filesystem::path& path) {
  return parse_question_set(read_file(path));
}

GenerationSet parse_generations(std::string_view text, const QuestionSet& questions) {
  GenerationSet out;
  std::unordered_set<std::string> known;
  for (const auto& q : questions.records) known.insert(q.question_id);
  std::set<std::tuple<std::string, RunKind, std::int64_t>> keys;

  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    try {
      auto rec = parse_generation(json::parse(line));
      if (!known.contains(rec.question_id)) {
        out.issues.push_back(issue(Severity::kError, rec.question_id, line_no,
                                   "unknown question_id \"" + rec.question_id + "\""));
        return;
      }
      if (!keys.emplace(rec.question_id, rec.run_kind, rec.run_index).second) {
        out.issues.push_back(issue(Severity::kError, rec.question_id, line_no,
                                   "duplicate " + to_string(rec.run_kind) + " run_index " +
                                       std::to_string(rec.run_index)));
        return;
      }
      if (rec.run_kind == RunKind::kGreedy && rec.run_index > 0) {
        out.issues.push_back(issue(Severity::kWarning, rec.question_id, line_no,
                                   "multiple greedy runs; greedy accuracy will be averaged"));
      }
      out.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      out.issues.push_back(issue(Severity::kError, std::nullopt, line_no,
                                 std::string("malformed JSON: ") + e.what()));
    } catch (const FieldError& e) {
      out.issues.push_back(issue(Severity::kError, std::nullopt, line_no, e.what()));
    }
  });
  return out;
}

GenerationSet load_generations(const std::filesystem::path& path, const QuestionSet& questions) {
  return parse_generations(read_file(path), questions);
}

TallyResult tally(const std::vector<GenerationRecord>& generations, std::int64_t k_max) {
  struct Acc {
    std::int64_t n = 0;
    std::int64_t c = 0;
    std::int64_t max_index = -1;
    bool unjudged = false;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Acc> acc;
  for (const auto& g : generations) {
    if (g.run_kind != RunKind::kSampled) continue;
    auto [it, fresh] = acc.try_emplace(g.question_id);
    if (fresh) order.push_back(g.question_id);
    auto& a = it->second;
    ++a.n;
    a.max_index = std::max(a.max_index, g.run_index);
    if (!g.judged_correct) {
      a.unjudged = true;
    } else if (*g.judged_correct) {
      ++a.c;
    }
  }

  TallyResult out;
  for (const auto& id : order) {
    const auto& a = acc.at(id);
    if (a.unjudged) {
      out.issues.push_back(issue(Severity::kError, id, std::nullopt, "unjudged sampled record"));
      continue;
    }
    if (a.max_index >= a.n) {
      out.issues.push_back(issue(Severity::kError, id, std::nullopt,
                                 "sampled run_index values are not 0.." + std::to_string(a.n - 1)));
      continue;
    }
    if (a.n < k_max) {
      out.issues.push_back(issue(Severity::kError, id, std::nullopt,
                                 "n=" + std::to_string(a.n) + " < k=" + std::to_string(k_max)));
      continue;
    }
    if (a.n < 3 * k_max) {
      out.issues.push_back(issue(Severity::kWarning, id, std::nullopt,
                                 "n < 3k (n=" + std::to_string(a.n) +
                                     ", 3k=" + std::to_string(3 * k_max) + ")"));
    }
    out.tallies.push_back({id, a.n, a.c});
  }
  return out;
}

std::string to_json_line(const QuestionRecord& r) {
  // nlohmann's default object type sorts keys; build the line by hand to keep field order.
  std::string out = "{";
  auto field = [&](const char* key, const std::string& value, bool last = false) {
    out += quoted(key) + ":" + quoted(value) + (last ? "" : ",");
  };
  field("question_id", r.question_id);
  field("dataset", r.dataset);
  field("language", to_string(r.language));
  field("question_type", to_string(r.question_type));
  field("prompt", r.prompt);
  field("reference_answer", r.reference_answer, true);
  return out + "}";
}

std::string to_json_line(const GenerationRecord& r) {
  std::string out = "{";
  out += "\"question_id\":" + quoted(r.question_id);
  out += ",\"run_index\":" + std::to_string(r.run_index);
  out += ",\"run_kind\":" + quoted(to_string(r.run_kind));
  out += ",\"completion\":" + quoted(r.completion);
  if (r.judged_correct) out += std::string(",\"judged_correct\":") + (*r.judged_correct ? "true" : "false");
  if (r.judge_raw) out += ",\"judge_raw\":" + quoted(*r.judge_raw);
  return out + "}";
}

}  // namespace gpass
