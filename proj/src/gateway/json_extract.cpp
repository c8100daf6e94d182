#include "pgr/gateway/json_extract.hpp"

#include <optional>
#include <string>

#include "pgr/core/error.hpp"

namespace pgr {

namespace {

// End (exclusive) of the balanced span starting at `start`, or nullopt if
// the text ends first.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

json extract_json(std::string_view raw) {
  std::optional<std::size_t> first_candidate;
  std::size_t pos = 0;
  while (true) {
    pos = raw.find_first_of("{[", pos);
    if (pos == std::string_view::npos) break;
    if (!first_candidate) first_candidate = pos;
    auto end = balanced_end(raw, pos);
    // A truncated span is a hard failure; looking inside it for a smaller
    // value would silently return a fragment.
    if (!end) break;
    json parsed = json::parse(raw.substr(pos, *end - pos), nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded()) return parsed;
    pos = *end;
  }
  if (!first_candidate) throw Error(ErrorCode::NoJsonFound, "");
  throw Error(ErrorCode::MalformedJson, std::to_string(*first_candidate));
}

}  // namespace pgr
