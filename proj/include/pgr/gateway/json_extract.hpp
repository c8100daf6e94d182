#pragma once

#include <nlohmann/json.hpp>
#include <string_view>

namespace pgr {

using json = nlohmann::json;

/// Pulls the first parseable JSON object or array out of an LLM reply.
///
/// Code fences and surrounding prose are skipped; once a candidate span is
/// isolated (balanced brackets, string-aware) it is parsed strictly. No
/// bracket repair is attempted. Throws Error{NoJsonFound} when the text has
/// no `{` or `[`, and Error{MalformedJson} (detail = byte offset of the
/// first candidate) when no candidate parses.
json extract_json(std::string_view raw);

}  // namespace pgr
