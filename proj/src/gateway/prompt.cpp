#include "pgr/gateway/prompt.hpp"

#include <array>

#include "pgr/core/error.hpp"

namespace pgr {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kBundledTemplates[];
extern const std::size_t kBundledTemplateCount;
}  // namespace detail

namespace {

constexpr std::array<std::pair<TemplateId, std::string_view>, 14> kNames = {{
    {TemplateId::Phase1Cot, "phase1_cot"},
    {TemplateId::Phase2Cot, "phase2_cot"},
    {TemplateId::Phase1Tot, "phase1_tot"},
    {TemplateId::Phase2Tot, "phase2_tot"},
    {TemplateId::QueryAugment, "query_augment"},
    {TemplateId::AnswerGen, "answer_gen"},
    {TemplateId::RetrievalEval, "retrieval_eval"},
    {TemplateId::PairwiseCmp, "pairwise_cmp"},
    {TemplateId::MemoryCreate, "memory_create"},
    {TemplateId::MemoryMerge, "memory_merge"},
    {TemplateId::ProspectionSummary, "prospection_summary"},
    {TemplateId::BenchQuery, "bench_query"},
    {TemplateId::BenchTimeline, "bench_timeline"},
    {TemplateId::BenchDialogue, "bench_dialogue"},
}};

bool name_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool name_char(char c) { return name_start(c) || (c >= '0' && c <= '9'); }

}  // namespace

std::string_view template_name(TemplateId id) noexcept {
  for (const auto& [tid, name] : kNames) {
    if (tid == id) return name;
  }
  return "unknown";
}

TemplateId template_from_name(std::string_view name) {
  for (const auto& [tid, n] : kNames) {
    if (n == name) return tid;
  }
  throw Error(ErrorCode::UnknownTemplate, std::string(name));
}

std::vector<TemplateId> all_templates() {
  std::vector<TemplateId> out;
  for (const auto& entry : kNames) out.push_back(entry.first);
  return out;
}

PromptTemplate::PromptTemplate(TemplateId id, std::string body) : id_(id), body_(std::move(body)) {
  std::string literal;
  std::size_t i = 0;
  while (i < body_.size()) {
    if (body_[i] == '{' && i + 1 < body_.size() && name_start(body_[i + 1])) {
      std::size_t j = i + 1;
      while (j < body_.size() && name_char(body_[j])) ++j;
      if (j < body_.size() && body_[j] == '}') {
        if (!literal.empty()) segments_.push_back({false, std::move(literal)});
        literal.clear();
        std::string name = body_.substr(i + 1, j - i - 1);
        placeholders_.insert(name);
        segments_.push_back({true, std::move(name)});
        i = j + 1;
        continue;
      }
    }
    literal.push_back(body_[i]);
    ++i;
  }
  if (!literal.empty()) segments_.push_back({false, std::move(literal)});
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  std::string out;
  out.reserve(body_.size() + 256);
  for (const auto& seg : segments_) {
    if (!seg.is_placeholder) {
      out += seg.text;
      continue;
    }
    auto it = bindings.find(seg.text);
    if (it == bindings.end()) throw Error(ErrorCode::MissingPlaceholder, seg.text);
    out += it->second;
  }
  return out;
}

const PromptTemplate& bundled_template(TemplateId id) {
  static const std::vector<PromptTemplate> templates = [] {
    std::vector<PromptTemplate> all;
    for (const auto& [tid, name] : kNames) {
      std::string_view body;
      bool found = false;
      for (std::size_t i = 0; i < detail::kBundledTemplateCount; ++i) {
        if (detail::kBundledTemplates[i].first == name) {
          body = detail::kBundledTemplates[i].second;
          found = true;
        }
      }
      if (!found) throw Error(ErrorCode::UnknownTemplate, std::string(name));
      all.emplace_back(tid, std::string(body));
    }
    return all;
  }();
  for (const auto& t : templates) {
    if (t.id() == id) return t;
  }
  throw Error(ErrorCode::UnknownTemplate, std::to_string(static_cast<int>(id)));
}

std::string render(TemplateId id, const Bindings& bindings) {
  return bundled_template(id).render(bindings);
}

}  // namespace pgr
