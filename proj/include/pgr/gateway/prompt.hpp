#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pgr {

enum class TemplateId {
  Phase1Cot,
  Phase2Cot,
  Phase1Tot,
  Phase2Tot,
  QueryAugment,
  AnswerGen,
  RetrievalEval,
  PairwiseCmp,
  MemoryCreate,
  MemoryMerge,
  ProspectionSummary,
  BenchQuery,
  BenchTimeline,
  BenchDialogue,
};

std::string_view template_name(TemplateId id) noexcept;
/// Throws Error{UnknownTemplate}.
TemplateId template_from_name(std::string_view name);
std::vector<TemplateId> all_templates();

using Bindings = std::map<std::string, std::string, std::less<>>;

/// A prompt body with `{name}` placeholders. Placeholder names match
/// `[a-z_][a-z0-9_]*`; any other brace (JSON examples in the body) is
/// literal text.
class PromptTemplate {
 public:
  PromptTemplate(TemplateId id, std::string body);

  TemplateId id() const { return id_; }
  const std::string& body() const { return body_; }
  const std::set<std::string, std::less<>>& placeholders() const { return placeholders_; }

  /// Substitutes every placeholder in a single pass; substituted text is
  /// never rescanned. Throws Error{MissingPlaceholder} naming the first
  /// unbound placeholder in body order. Extra bindings are ignored.
  std::string render(const Bindings& bindings) const;

 private:
  struct Segment {
    bool is_placeholder;
    std::string text;
  };

  TemplateId id_;
  std::string body_;
  std::vector<Segment> segments_;
  std::set<std::string, std::less<>> placeholders_;
};

/// The template compiled into the binary from prompts/<name>.txt.
const PromptTemplate& bundled_template(TemplateId id);

/// Convenience: bundled_template(id).render(bindings).
std::string render(TemplateId id, const Bindings& bindings);

}  // namespace pgr
