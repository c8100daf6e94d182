#include "pgr/answer/answer.hpp"

#include <fstream>

#include "pgr/gateway/prompt.hpp"

namespace pgr {

using nlohmann::json;

namespace {

std::string text_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::MalformedJson, std::string("missing \"") + key + "\"");
  const json& v = j[key];
  if (v.is_string()) return v.get<std::string>();
  // Some models return the reasoning bullets as a list.
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!item.is_string()) throw Error(ErrorCode::MalformedJson, std::string(key) + " holds non-text items");
      if (!out.empty()) out += '\n';
      out += item.get<std::string>();
    }
    return out;
  }
  throw Error(ErrorCode::MalformedJson, std::string(key) + " is not text");
}

struct ParsedAnswer {
  std::string reasoning;
  std::string answer;
};

}  // namespace

std::string render_answer_prompt(const AnswerInputs& in) {
  std::string sim;
  if (in.use_summary && !in.summary.empty()) {
    sim = "Simulation Context (how the user is likely to approach this request):\n" + in.summary;
  }
  return render(TemplateId::AnswerGen, {{"context", format_fact_lines(in.facts, kNoStoredFacts)},
                                        {"optional_date", in.date ? "Date: " + in.date->to_string() : ""},
                                        {"query", in.query},
                                        {"optional_simulation_context", sim}});
}

AnswerRecord generate_answer(const Gateway& gateway, const AnswerInputs& in) {
  std::string key = in.match_key.empty() ? "ANS:" + in.query_id : in.match_key;
  auto asked = ask_json<ParsedAnswer>(gateway, render_answer_prompt(in), key, [](const json& j) {
    ParsedAnswer p{text_field(j, "reasoning"), text_field(j, "answer")};
    if (p.reasoning.empty() || p.answer.empty()) throw Error(ErrorCode::MalformedJson, "empty reasoning or answer");
    return p;
  });
  if (!asked.ok()) {
    if (asked.gateway_error) throw Error(*asked.gateway_error, asked.failure);
    throw Error(ErrorCode::UnparseableAfterRetry, "answer for " + in.query_id + ": " + asked.failure);
  }
  AnswerRecord r;
  r.query_id = in.query_id;
  r.reasoning = std::move(asked.value->reasoning);
  r.answer = std::move(asked.value->answer);
  r.used_summary = in.use_summary && !in.summary.empty();
  for (const auto& f : in.facts) r.fact_ids_in_context.push_back(f->fid);
  r.llm_calls = asked.calls;
  return r;
}

json to_json(const AnswerRecord& r) {
  return {{"query_id", r.query_id},
          {"reasoning", r.reasoning},
          {"answer", r.answer},
          {"used_summary", r.used_summary},
          {"fact_ids_in_context", r.fact_ids_in_context},
          {"llm_calls", r.llm_calls}};
}

AnswerRecord answer_from_json(const json& j) {
  AnswerRecord r;
  try {
    r.query_id = j.at("query_id").get<std::string>();
    r.reasoning = j.at("reasoning").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.used_summary = j.value("used_summary", false);
    r.fact_ids_in_context = j.value("fact_ids_in_context", std::vector<std::string>{});
    r.llm_calls = j.value("llm_calls", 0);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("answer record: ") + e.what());
  }
  return r;
}

void write_answers(const std::vector<AnswerRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<AnswerRecord> read_answers(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<AnswerRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(answer_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::CorruptRecord, path.filename().string() + ":" + std::to_string(n));
    }
  }
  return out;
}

}  // namespace pgr
