#include "gpass/judge.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <stdexcept>

namespace gpass {
namespace detail {
extern const std::string_view kJudgeTemplateEn;
extern const std::string_view kJudgeTemplateCn;
}  // namespace detail

namespace {

constexpr std::array<std::string_view, 3> kPlaceholders{"{question}", "{reference_answer}",
                                                        "{candidate_answer}"};

std::string_view trim(std::string_view s) {
  const auto ws = [](char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kYes:
      return "yes";
    case Verdict::kNo:
      return "no";
    case Verdict::kUnparseable:
      return "unparseable";
  }
  return "unparseable";
}

std::optional<Verdict> parse_verdict_name(const std::string& s) {
  if (s == "yes") return Verdict::kYes;
  if (s == "no") return Verdict::kNo;
  if (s == "unparseable") return Verdict::kUnparseable;
  return std::nullopt;
}

std::string_view judge_template(Language language) {
  return language == Language::kEn ? detail::kJudgeTemplateEn : detail::kJudgeTemplateCn;
}

std::string render_judge_prompt(std::string_view question, std::string_view reference_answer,
                                std::string_view candidate_answer, Language language) {
  if (question.empty() || reference_answer.empty() || candidate_answer.empty()) {
    throw std::invalid_argument("judge prompt inputs must be non-empty");
  }
  const std::array<std::string_view, 3> values{question, reference_answer, candidate_answer};
  const auto tpl = judge_template(language);

  std::string out;
  out.reserve(tpl.size() + question.size() + reference_answer.size() + candidate_answer.size());
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const auto brace = tpl.find('{', pos);
    if (brace == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    out.append(tpl.substr(pos, brace - pos));
    pos = brace;
    bool replaced = false;
    for (std::size_t i = 0; i < kPlaceholders.size(); ++i) {
      if (tpl.substr(pos).starts_with(kPlaceholders[i])) {
        out.append(values[i]);
        pos += kPlaceholders[i].size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(tpl[pos++]);
  }
  return out;
}

Verdict parse_verdict(std::string_view raw) {
  constexpr std::string_view kOpen = "boxed{";
  const auto at = raw.rfind(kOpen);
  if (at == std::string_view::npos) return Verdict::kUnparseable;
  const auto body_start = at + kOpen.size();
  int depth = 1;
  std::size_t i = body_start;
  for (; i < raw.size(); ++i) {
    if (raw[i] == '{') ++depth;
    if (raw[i] == '}' && --depth == 0) break;
  }
  if (depth != 0) return Verdict::kUnparseable;
  const auto body = trim(raw.substr(body_start, i - body_start));
  if (body == "yes") return Verdict::kYes;
  if (body == "no") return Verdict::kNo;
  return Verdict::kUnparseable;
}

std::string judge_cache_key(std::string_view question, std::string_view reference_answer,
                            std::string_view candidate_answer, std::string_view model_name,
                            Language language) {
  std::string message;
  auto put = [&](std::string_view field) {
    std::uint64_t len = field.size();
    for (int b = 0; b < 8; ++b) message.push_back(static_cast<char>((len >> (8 * b)) & 0xff));
    message.append(field);
  };
  put("gpass-judge-v1");
  put(question);
  put(reference_answer);
  put(candidate_answer);
  put(model_name);
  put(to_string(language));

  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(message.data(), message.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

}  // namespace gpass
