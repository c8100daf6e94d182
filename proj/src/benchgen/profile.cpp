#include "pgr/benchgen/profile.hpp"

#include <fstream>

#include "pgr/core/error.hpp"

namespace pgr {

using nlohmann::json;

std::string PersonaProfile::persona_text() const {
  std::string out = "User profile: " + demographics;
  for (const auto& [domain, summary] : domain_summaries) out += "\n" + domain + ": " + summary;
  return out;
}

std::string PersonaProfile::domain_text() const {
  std::string out;
  for (const auto& [domain, summary] : domain_summaries) {
    if (!out.empty()) out += '\n';
    out += "- " + domain + ": " + summary;
  }
  return out;
}

json to_json(const PersonaProfile& p) {
  return {{"user_id", p.user_id}, {"demographics", p.demographics}, {"domain_summaries", p.domain_summaries}};
}

PersonaProfile persona_from_json(const json& j) {
  PersonaProfile p;
  try {
    p.user_id = j.at("user_id").get<std::string>();
    p.demographics = j.value("demographics", std::string());
    if (j.contains("domain_summaries")) p.domain_summaries = j["domain_summaries"].get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("profile: ") + e.what());
  }
  if (p.user_id.empty()) throw Error(ErrorCode::InvalidArgument, "profile without user_id");
  return p;
}

PersonaProfile read_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  try {
    return persona_from_json(json::parse(in));
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::CorruptRecord, path.filename().string() + ":1");
  }
}

void write_profile(const PersonaProfile& p, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json(p).dump(2) << '\n';
}

}  // namespace pgr
