#include "pgr/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>

#include "pgr/gateway/embedding.hpp"
#include "pgr/gateway/prompt.hpp"

namespace pgr {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

[[noreturn]] void invalid_case(const std::string& why) { throw Error(ErrorCode::CaseInvalid, why); }

}  // namespace

// ---------------------------------------------------------------------------
// Cases

void QueryCase::validate() const {
  if (query_id.empty()) invalid_case("case without query_id");
  if (query.empty()) invalid_case(query_id + ": empty query");
  if (required_references.empty()) invalid_case(query_id + ": no required references");
  std::set<std::string> ids;
  for (const auto& r : required_references) {
    if (r.text.empty()) invalid_case(query_id + ": reference with empty text");
    if (!ids.insert(r.ref_id).second) invalid_case(query_id + ": duplicate ref_id " + r.ref_id);
  }
  if (reference_fact_ids && reference_fact_ids->size() != required_references.size()) {
    invalid_case(query_id + ": reference_fact_ids does not match the reference count");
  }
}

json to_json(const QueryCase& c) {
  json refs = json::array();
  for (const auto& r : c.required_references) {
    json item{{"ref_id", r.ref_id}, {"text", r.text}};
    item["date"] = r.date ? json(r.date->to_string()) : json(nullptr);
    refs.push_back(std::move(item));
  }
  json out{{"query_id", c.query_id},
           {"user_id", c.user_id},
           {"query", c.query},
           {"query_date", c.query_date.to_string()},
           {"required_references", refs}};
  if (c.reference_fact_ids) out["reference_fact_ids"] = *c.reference_fact_ids;
  return out;
}

QueryCase query_case_from_json(const json& j) {
  QueryCase c;
  try {
    c.query_id = j.at("query_id").get<std::string>();
    c.user_id = j.value("user_id", std::string());
    c.query = j.at("query").get<std::string>();
    c.query_date = Date::parse_or_throw(j.at("query_date").get<std::string>());
    int n = 0;
    for (const auto& r : j.at("required_references")) {
      RequiredReference ref;
      ++n;
      if (r.is_string()) {
        ref.ref_id = std::to_string(n);
        ref.text = r.get<std::string>();
      } else {
        ref.ref_id = r.contains("ref_id") ? r["ref_id"].get<std::string>() : std::to_string(n);
        ref.text = r.at("text").get<std::string>();
        if (r.contains("date") && !r["date"].is_null()) ref.date = Date::parse_or_throw(r["date"].get<std::string>());
      }
      c.required_references.push_back(std::move(ref));
    }
    if (j.contains("reference_fact_ids") && !j["reference_fact_ids"].is_null()) {
      c.reference_fact_ids = j["reference_fact_ids"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    invalid_case(std::string("case record: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<QueryCase> read_cases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<QueryCase> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw Error(ErrorCode::CorruptRecord, path.filename().string() + ":" + std::to_string(n));
    }
    out.push_back(query_case_from_json(j));
  }
  return out;
}

void write_cases(const std::vector<QueryCase>& cases, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& c : cases) out << to_json(c).dump() << '\n';
}

std::string format_references(const std::vector<RequiredReference>& refs) {
  std::string out;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    out += "\n" + std::to_string(i + 1) + ". ";
    if (refs[i].date) out += "[" + refs[i].date->to_string() + "] ";
    out += refs[i].text;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recall

RecallResult make_recall(std::string query_id, std::vector<RefJudgment> per_ref) {
  RecallResult r;
  r.query_id = std::move(query_id);
  r.per_ref = std::move(per_ref);
  if (r.per_ref.empty()) throw Error(ErrorCode::EmptyReferences, "recall over zero references");
  int present = 0;
  for (const auto& j : r.per_ref) present += j.present ? 1 : 0;
  r.recall = static_cast<double>(present) / static_cast<double>(r.per_ref.size());
  r.recall_exact = present == static_cast<int>(r.per_ref.size()) ? 1 : 0;
  return r;
}

AckEntry parse_ack_entry(const std::string& item) {
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < item.size() && std::isspace(static_cast<unsigned char>(item[i]))) ++i;
  };
  skip_space();
  // Optional "n." / "n)" / "n:" numbering.
  std::size_t digits = i;
  while (digits < item.size() && std::isdigit(static_cast<unsigned char>(item[digits]))) ++digits;
  if (digits > i && digits < item.size() && (item[digits] == '.' || item[digits] == ')' || item[digits] == ':')) {
    i = digits + 1;
  }
  skip_space();
  std::string head = lower(item.substr(i, 3));
  AckEntry out;
  std::size_t word = 0;
  if (head == "yes") {
    out.present = true;
    word = 3;
  } else if (head.rfind("no", 0) == 0) {
    word = 2;
  } else {
    throw Error(ErrorCode::MalformedJson, "ack item does not start with Yes/No: " + item);
  }
  // Reject words that merely start with yes/no ("nothing").
  std::size_t end = i + word;
  if (end < item.size() && std::isalpha(static_cast<unsigned char>(item[end]))) {
    throw Error(ErrorCode::MalformedJson, "ack item does not start with Yes/No: " + item);
  }
  std::string rest = item.substr(end);
  std::size_t r = rest.find_first_not_of(" .,:;-");
  out.reason = r == std::string::npos ? "" : trim(rest.substr(r));
  return out;
}

RecallResult judge_recall(const Gateway& judge, const QueryCase& c, const std::string& retrieved_context,
                          const std::string& match_key) {
  c.validate();
  const std::size_t n = c.required_references.size();
  std::string prompt = render(TemplateId::RetrievalEval, {{"user_query", c.query},
                                                          {"refs_list", format_references(c.required_references)},
                                                          {"retrieved_context", "\n" + retrieved_context}});
  auto asked = ask_json<std::vector<AckEntry>>(judge, prompt, match_key, [n](const json& j) {
    const json* list = nullptr;
    if (j.is_object() && j.contains("ack")) list = &j["ack"];
    if (!list || !list->is_array()) throw Error(ErrorCode::MalformedJson, "missing \"ack\" list");
    if (list->size() != n) {
      throw Error(ErrorCode::AckLengthMismatch,
                  "expected " + std::to_string(n) + " ack items, got " + std::to_string(list->size()));
    }
    std::vector<AckEntry> out;
    for (const auto& item : *list) {
      if (!item.is_string()) throw Error(ErrorCode::MalformedJson, "ack item is not text");
      out.push_back(parse_ack_entry(item.get<std::string>()));
    }
    return out;
  });
  if (!asked.ok()) {
    RecallResult r;
    r.query_id = c.query_id;
    r.evaluated = false;
    if (asked.gateway_error) {
      r.error = asked.gateway_error;
    } else if (asked.last_error == ErrorCode::AckLengthMismatch) {
      r.error = ErrorCode::AckLengthMismatch;
    } else {
      r.error = ErrorCode::UnparseableAfterRetry;
    }
    r.error_detail = asked.failure;
    r.llm_calls = asked.calls;
    return r;
  }
  std::vector<RefJudgment> per_ref;
  for (std::size_t i = 0; i < n; ++i) {
    per_ref.push_back({c.required_references[i].ref_id, (*asked.value)[i].present, (*asked.value)[i].reason});
  }
  RecallResult r = make_recall(c.query_id, std::move(per_ref));
  r.llm_calls = asked.calls;
  return r;
}

RecallResult oracle_recall(const QueryCase& c, const std::vector<std::string>& retrieved) {
  if (!c.reference_fact_ids) throw Error(ErrorCode::MissingGroundTruthIds, c.query_id);
  std::set<std::string> have(retrieved.begin(), retrieved.end());
  std::vector<RefJudgment> per_ref;
  for (std::size_t i = 0; i < c.reference_fact_ids->size(); ++i) {
    const auto& fid = (*c.reference_fact_ids)[i];
    bool present = have.count(fid) != 0;
    std::string ref_id = i < c.required_references.size() ? c.required_references[i].ref_id : std::to_string(i + 1);
    per_ref.push_back({ref_id, present, present ? fid + " retrieved" : fid + " not retrieved"});
  }
  return make_recall(c.query_id, std::move(per_ref));
}

// ---------------------------------------------------------------------------
// Pairwise

std::string_view to_string(PairChoice c) noexcept {
  switch (c) {
    case PairChoice::First: return "first";
    case PairChoice::Second: return "second";
    case PairChoice::Tie: return "tie";
  }
  return "tie";
}

double pass_credit(bool a_first, PairChoice choice) {
  switch (choice) {
    case PairChoice::Tie: return kTieCredit;
    case PairChoice::First: return a_first ? 1.0 : 0.0;
    case PairChoice::Second: return a_first ? 0.0 : 1.0;
  }
  return kTieCredit;
}

std::pair<std::string, std::string> pair_labels(const std::string& query_id, int pass) {
  static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::mt19937_64 rng(fnv1a64(query_id + "#pair#" + std::to_string(pass)));
  auto draw = [&] {
    std::string s;
    // First character is a letter so a label never parses as a number.
    s += alphabet[rng() % 26];
    for (int i = 0; i < 3; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  std::string first = draw();
  std::string second = draw();
  while (second == first) second = draw();
  return {first, second};
}

std::string pair_match_key(const PairContext& ctx, const std::string& query_id, int pass) {
  return "PAIR:" + ctx.arm_a + ":" + ctx.arm_b + ":" + query_id + ":" + std::to_string(pass);
}

PairwiseOutcome make_pairwise(std::string query_id, std::optional<PairChoice> pass0,
                              std::optional<PairChoice> pass1) {
  PairwiseOutcome o;
  o.query_id = std::move(query_id);
  std::array<std::optional<PairChoice>, 2> choices{pass0, pass1};
  double sum = 0.0;
  for (int p = 0; p < 2; ++p) {
    auto& pass = o.passes[p];
    pass.a_first = p == 0;
    pass.choice = choices[p];
    pass.valid = choices[p].has_value();
    if (pass.valid) {
      pass.credit_for_a = pass_credit(pass.a_first, *pass.choice);
      sum += pass.credit_for_a;
    } else {
      o.partial = true;
    }
  }
  o.credit_for_a = o.partial ? 0.0 : sum / 2.0;
  return o;
}

PairwiseOutcome judge_pair(const Gateway& judge, const QueryCase& c, const std::string& response_a,
                           const std::string& response_b, const PairContext& ctx) {
  if (response_a.empty() || response_b.empty()) {
    throw Error(ErrorCode::InvalidArgument, c.query_id + ": pairwise comparison needs two non-empty responses");
  }
  std::array<std::optional<PairChoice>, 2> choices;
  std::array<PairPass, 2> passes;
  int calls = 0;
  for (int p = 0; p < 2; ++p) {
    bool a_first = p == 0;
    auto [first_label, second_label] = pair_labels(c.query_id, p);
    std::string gt;
    if (!ctx.ground_truth.empty()) gt = "Ground truth (facts a strong response should use):\n" + ctx.ground_truth;
    std::string prompt = render(TemplateId::PairwiseCmp,
                                {{"persona_text", ctx.persona_text},
                                 {"facts_text", ctx.facts_text},
                                 {"first_label", first_label},
                                 {"second_label", second_label},
                                 {"optional_date", ctx.date ? "Date: " + ctx.date->to_string() : ""},
                                 {"query", c.query},
                                 {"ground_truth_section", gt},
                                 {"first_response", a_first ? response_a : response_b},
                                 {"second_response", a_first ? response_b : response_a}});
    struct Verdict {
      PairChoice choice;
      std::string reasoning;
    };
    auto asked = ask_json<Verdict>(
        judge, prompt, pair_match_key(ctx, c.query_id, p), [&, fl = first_label, sl = second_label](const json& j) {
          if (!j.is_object() || !j.contains("choice") || !j["choice"].is_string()) {
            throw Error(ErrorCode::MalformedJson, "missing \"choice\"");
          }
          std::string pick = lower(trim(j["choice"].get<std::string>()));
          Verdict v{PairChoice::Tie, j.value("reasoning", std::string())};
          if (pick == fl) {
            v.choice = PairChoice::First;
          } else if (pick == sl) {
            v.choice = PairChoice::Second;
          } else if (pick != "tie") {
            throw Error(ErrorCode::MalformedJson, "choice '" + pick + "' names neither label nor tie");
          }
          return v;
        });
    calls += asked.calls;
    passes[p].first_label = first_label;
    passes[p].second_label = second_label;
    if (asked.ok()) {
      choices[p] = asked.value->choice;
      passes[p].reasoning = asked.value->reasoning;
    } else {
      passes[p].error = asked.failure;
    }
  }
  PairwiseOutcome o = make_pairwise(c.query_id, choices[0], choices[1]);
  for (int p = 0; p < 2; ++p) {
    o.passes[p].first_label = passes[p].first_label;
    o.passes[p].second_label = passes[p].second_label;
    o.passes[p].reasoning = passes[p].reasoning;
    o.passes[p].error = passes[p].error;
  }
  o.arm_a = ctx.arm_a;
  o.arm_b = ctx.arm_b;
  o.llm_calls = calls;
  return o;
}

// ---------------------------------------------------------------------------
// Aggregation

Report aggregate(const std::vector<RecallResult>& recalls, const std::vector<PairwiseOutcome>& pairs) {
  Report r;
  double recall_sum = 0.0, exact_sum = 0.0;
  for (const auto& x : recalls) {
    if (!x.evaluated) {
      ++r.unevaluated;
      continue;
    }
    ++r.n;
    recall_sum += x.recall;
    exact_sum += x.recall_exact;
  }
  double credit_sum = 0.0;
  for (const auto& p : pairs) {
    if (p.partial) {
      ++r.unevaluated_pairwise;
      continue;
    }
    ++r.n_pairwise;
    credit_sum += p.credit_for_a;
  }
  if (r.n == 0 && r.n_pairwise == 0) throw Error(ErrorCode::NoEvaluatedCases, "nothing to aggregate");
  if (r.n > 0) {
    r.has_recall = true;
    r.mean_recall = recall_sum / r.n;
    r.mean_recall_exact = exact_sum / r.n;
  }
  if (r.n_pairwise > 0) {
    r.has_pairwise = true;
    r.win_rate_percent = 100.0 * credit_sum / r.n_pairwise;
  }
  return r;
}

json to_json(const Report& r) {
  json out{{"n", r.n}, {"unevaluated", r.unevaluated}};
  if (r.has_recall) {
    out["mean_recall"] = r.mean_recall;
    out["mean_recall_exact"] = r.mean_recall_exact;
  }
  if (r.has_pairwise || r.unevaluated_pairwise > 0) {
    out["n_pairwise"] = r.n_pairwise;
    out["unevaluated_pairwise"] = r.unevaluated_pairwise;
    if (r.has_pairwise) out["win_rate_percent"] = r.win_rate_percent;
    out["tie_credit"] = kTieCredit;
  }
  return out;
}

json to_json(const RecallResult& r) {
  json per_ref = json::array();
  for (const auto& j : r.per_ref) per_ref.push_back({{"ref_id", j.ref_id}, {"present", j.present}, {"reason", j.reason}});
  json out{{"query_id", r.query_id},      {"evaluated", r.evaluated}, {"per_ref", per_ref},
           {"recall", r.recall},          {"recall_exact", r.recall_exact}, {"llm_calls", r.llm_calls}};
  if (r.error) {
    out["error"] = std::string(to_string(*r.error));
    out["error_detail"] = r.error_detail;
  }
  return out;
}

json to_json(const PairwiseOutcome& o) {
  json passes = json::array();
  for (const auto& p : o.passes) {
    json item{{"a_first", p.a_first},
              {"first_label", p.first_label},
              {"second_label", p.second_label},
              {"valid", p.valid},
              {"credit_for_a", p.credit_for_a},
              {"reasoning", p.reasoning}};
    item["choice"] = p.choice ? json(std::string(to_string(*p.choice))) : json(nullptr);
    if (!p.error.empty()) item["error"] = p.error;
    passes.push_back(std::move(item));
  }
  return {{"query_id", o.query_id}, {"arm_a", o.arm_a},     {"arm_b", o.arm_b},        {"passes", passes},
          {"partial", o.partial},   {"credit_for_a", o.credit_for_a}, {"llm_calls", o.llm_calls}};
}

}  // namespace pgr
