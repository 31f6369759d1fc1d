#include "gpass/judge.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <thread>
#include <tuple>

namespace gpass {
namespace {

using nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("judge URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

enum class CallStatus { kOk, kTransportError, kMalformed };

struct CallResult {
  CallStatus status = CallStatus::kTransportError;
  std::string text;
};

class ChatClient {
 public:
  ChatClient(const JudgeConfig& cfg, const Endpoint& ep) : cfg_(cfg), path_(ep.path), client_(ep.origin) {
    client_.set_connection_timeout(std::chrono::seconds(cfg.connect_timeout_s));
    client_.set_read_timeout(std::chrono::seconds(cfg.read_timeout_s));
    if (!cfg.api_key.empty()) client_.set_bearer_token_auth(cfg.api_key);
  }

  CallResult complete(const std::string& prompt) {
    const json body = {
        {"model", cfg_.model_name},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", cfg_.temperature},
        {"max_tokens", cfg_.max_output_tokens},
    };
    auto res = client_.Post(path_, body.dump(), "application/json");
    if (!res) return {CallStatus::kTransportError, httplib::to_string(res.error())};
    if (res->status >= 500 || res->status == 429) {
      return {CallStatus::kTransportError, "HTTP " + std::to_string(res->status)};
    }
    if (res->status != 200) return {CallStatus::kMalformed, "HTTP " + std::to_string(res->status)};
    try {
      const auto reply = json::parse(res->body);
      return {CallStatus::kOk, reply.at("choices").at(0).at("message").at("content").get<std::string>()};
    } catch (const json::exception&) {
      return {CallStatus::kMalformed, res->body};
    }
  }

 private:
  const JudgeConfig& cfg_;
  std::string path_;
  httplib::Client client_;
};

struct Job {
  std::string key;
  std::string prompt;
  std::string label;  // first record using this key, for diagnostics
};

std::string record_label(const GenerationRecord& r) {
  return r.question_id + "/" + to_string(r.run_kind) + "/" + std::to_string(r.run_index);
}

}  // namespace

void JudgeConfig::validate() const {
  if (endpoint_url.empty()) throw std::invalid_argument("judge endpoint URL is required");
  if (model_name.empty()) throw std::invalid_argument("judge model name is required");
  if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
  if (max_parallel_requests < 1) throw std::invalid_argument("max_parallel_requests must be >= 1");
  if (retry_limit < 0) throw std::invalid_argument("retry_limit must be >= 0");
  if (max_output_tokens < 1) throw std::invalid_argument("max_output_tokens must be >= 1");
  split_url(endpoint_url);
}

VerdictCache::VerdictCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    try {
      const auto j = json::parse(line);
      const auto verdict = parse_verdict_name(j.at("verdict").get<std::string>());
      if (!verdict) continue;
      entries_[j.at("cache_key").get<std::string>()] = {*verdict, j.at("raw_text").get<std::string>()};
    } catch (const json::exception&) {
      // Torn write from an interrupted run.
    }
  }
}

std::optional<VerdictCache::Entry> VerdictCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void VerdictCache::store(const std::string& key, const Entry& entry) {
  std::lock_guard lock(mutex_);
  entries_[key] = entry;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to cache " + path_.string());
  const json line = {{"cache_key", key}, {"verdict", to_string(entry.verdict)}, {"raw_text", entry.raw_text}};
  out << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  out.flush();
}

std::size_t VerdictCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

JudgeBatchResult judge_batch(const std::vector<GenerationRecord>& records, const QuestionSet& questions,
                             const JudgeConfig& cfg) {
  cfg.validate();
  const auto endpoint = split_url(cfg.endpoint_url);
  VerdictCache cache = cfg.cache_path.empty() ? VerdictCache() : VerdictCache(cfg.cache_path);

  JudgeBatchResult result;
  std::vector<std::string> record_keys;
  std::vector<Job> jobs;
  std::set<std::string> queued;
  for (const auto& r : records) {
    const auto* q = questions.find(r.question_id);
    if (q == nullptr) throw std::invalid_argument("record references unknown question " + r.question_id);
    const auto key =
        judge_cache_key(q->prompt, q->reference_answer, r.completion, cfg.model_name, q->language);
    record_keys.push_back(key);
    if (cache.lookup(key)) {
      ++result.cache_hits;
      continue;
    }
    if (queued.insert(key).second) {
      jobs.push_back({key, render_judge_prompt(q->prompt, q->reference_answer, r.completion, q->language),
                      record_label(r)});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::int64_t> calls{0};
  std::vector<char> unreachable(jobs.size(), 0);
  auto worker = [&] {
    ChatClient client(cfg, endpoint);
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      VerdictCache::Entry entry{Verdict::kUnparseable, {}};
      bool answered = false;
      for (std::int64_t attempt = 0; attempt <= cfg.retry_limit; ++attempt) {
        if (attempt > 0 && cfg.retry_backoff_ms > 0) {
          std::this_thread::sleep_for(std::chrono::milliseconds(cfg.retry_backoff_ms << (attempt - 1)));
        }
        ++calls;
        auto reply = client.complete(jobs[i].prompt);
        if (reply.status == CallStatus::kTransportError) continue;
        answered = true;
        entry.raw_text = std::move(reply.text);
        if (reply.status == CallStatus::kMalformed) continue;
        entry.verdict = parse_verdict(entry.raw_text);
        if (entry.verdict != Verdict::kUnparseable) break;
      }
      if (!answered) {
        unreachable[i] = 1;
        continue;
      }
      cache.store(jobs[i].key, entry);
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.max_parallel_requests), jobs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  result.network_calls = calls.load();

  std::vector<std::string> outstanding;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (unreachable[i]) outstanding.push_back(jobs[i].label);
  }
  if (!outstanding.empty()) {
    throw JudgeBatchError("judge endpoint unreachable after " + std::to_string(cfg.retry_limit) +
                              " retries; " + std::to_string(outstanding.size()) + " inputs outstanding",
                          std::move(outstanding));
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto entry = cache.lookup(record_keys[i]);
    const auto& r = records[i];
    result.verdicts.push_back(
        {r.question_id, r.run_kind, r.run_index, entry->verdict, entry->raw_text, record_keys[i]});
  }
  std::sort(result.verdicts.begin(), result.verdicts.end(), [](const JudgeVerdict& a, const JudgeVerdict& b) {
    return std::tie(a.question_id, a.run_kind, a.run_index) < std::tie(b.question_id, b.run_kind, b.run_index);
  });
  return result;
}

void apply_verdicts(std::vector<GenerationRecord>& records, const std::vector<JudgeVerdict>& verdicts) {
  std::map<std::tuple<std::string, RunKind, std::int64_t>, const JudgeVerdict*> index;
  for (const auto& v : verdicts) index[{v.question_id, v.run_kind, v.run_index}] = &v;
  for (auto& r : records) {
    const auto it = index.find({r.question_id, r.run_kind, r.run_index});
    if (it == index.end()) continue;
    r.judged_correct = it->second->correct();
    r.judge_raw = it->second->raw_text;
  }
}

Agreement agreement_rate(const std::vector<JudgeVerdict>& a, const std::vector<JudgeVerdict>& b) {
  using Key = std::tuple<std::string, RunKind, std::int64_t>;
  auto index = [](const std::vector<JudgeVerdict>& vs) {
    std::map<Key, bool> m;
    for (const auto& v : vs) {
      if (!m.emplace(Key{v.question_id, v.run_kind, v.run_index}, v.correct()).second) {
        throw std::invalid_argument("duplicate verdict for " + v.question_id + "/" +
                                    std::to_string(v.run_index));
      }
    }
    return m;
  };
  const auto ma = index(a);
  const auto mb = index(b);
  if (ma.size() != mb.size()) throw std::invalid_argument("verdict lists cover different keys");
  if (ma.empty()) throw std::invalid_argument("no verdicts to compare");

  Agreement out;
  for (auto ia = ma.begin(), ib = mb.begin(); ia != ma.end(); ++ia, ++ib) {
    if (ia->first != ib->first) {
      throw std::invalid_argument("verdict lists cover different keys (first mismatch at " +
                                  std::get<0>(ia->first) + ")");
    }
    (ia->second == ib->second ? out.agreements : out.disagreements) += 1;
  }
  out.accuracy = 100.0 * static_cast<double>(out.agreements) /
                 static_cast<double>(out.agreements + out.disagreements);
  return out;
}

std::string to_json_line(const JudgeVerdict& v) {
  auto q = [](const std::string& s) { return json(s).dump(-1, ' ', false, json::error_handler_t::replace); };
  return "{\"question_id\":" + q(v.question_id) + ",\"run_index\":" + std::to_string(v.run_index) +
         ",\"run_kind\":" + q(to_string(v.run_kind)) + ",\"verdict\":" + q(to_string(v.verdict)) +
         ",\"raw_text\":" + q(v.raw_text) + ",\"cache_key\":" + q(v.cache_key) + "}";
}

std::vector<JudgeVerdict> load_verdicts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string());
  std::vector<JudgeVerdict> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      JudgeVerdict v;
      v.question_id = j.at("question_id").get<std::string>();
      v.run_index = j.at("run_index").get<std::int64_t>();
      if (const auto it = j.find("run_kind"); it != j.end()) {
        const auto kind = parse_run_kind(it->get<std::string>());
        if (!kind) throw std::invalid_argument("unknown run_kind");
        v.run_kind = *kind;
      }
      if (const auto it = j.find("verdict"); it != j.end()) {
        const auto verdict = parse_verdict_name(it->get<std::string>());
        if (!verdict) throw std::invalid_argument("unknown verdict");
        v.verdict = *verdict;
      } else {
        v.verdict = j.at("judged_correct").get<bool>() ? Verdict::kYes : Verdict::kNo;
      }
      if (const auto it = j.find("raw_text"); it != j.end()) v.raw_text = it->get<std::string>();
      if (const auto it = j.find("cache_key"); it != j.end()) v.cache_key = it->get<std::string>();
      out.push_back(std::move(v));
    } catch (const std::exception& e) {
      throw IngestError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gpass
