#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace pgr {

struct PersonaProfile {
  std::string user_id;
  std::string demographics;
  std::map<std::string, std::string> domain_summaries;
  friend bool operator==(const PersonaProfile&, const PersonaProfile&) = default;

  /// Demographics followed by one "domain: summary" line per domain.
  std::string persona_text() const;
  /// "- domain: summary" lines.
  std::string domain_text() const;
};

nlohmann::json to_json(const PersonaProfile& p);
/// Throws Error{InvalidArgument}.
PersonaProfile persona_from_json(const nlohmann::json& j);
PersonaProfile read_profile(const std::filesystem::path& path);
void write_profile(const PersonaProfile& p, const std::filesystem::path& path);

}  // namespace pgr
