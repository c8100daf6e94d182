#include "pgr/prospection/pgr.hpp"

#include <fstream>
#include <set>
#include <unordered_map>

#include "pgr/gateway/prompt.hpp"

namespace pgr {

using nlohmann::json;

namespace {

constexpr const char* kNoFactsYet = "(no personal facts retrieved yet)";

// Ordered fact set keyed by fid; a repeated fid keeps its best score.
class FactSet {
 public:
  /// Returns true when `sf` was new.
  bool add(const ScoredFact& sf) {
    auto [it, inserted] = index_.emplace(sf.fact->fid, items_.size());
    if (inserted) {
      items_.push_back(sf);
      return true;
    }
    if (sf.score > items_[it->second].score) items_[it->second].score = sf.score;
    return false;
  }
  bool contains(const std::string& fid) const { return index_.count(fid) != 0; }
  const std::vector<ScoredFact>& items() const { return items_; }
  std::vector<FactPtr> facts() const {
    std::vector<FactPtr> out;
    out.reserve(items_.size());
    for (const auto& sf : items_) out.push_back(sf.fact);
    return out;
  }

 private:
  std::vector<ScoredFact> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

TemplateId phase1_template(ProspectionMode m) {
  return m == ProspectionMode::Cot ? TemplateId::Phase1Cot : TemplateId::Phase1Tot;
}
TemplateId phase2_template(ProspectionMode m) {
  return m == ProspectionMode::Cot ? TemplateId::Phase2Cot : TemplateId::Phase2Tot;
}
std::string mode_tag(ProspectionMode m) { return m == ProspectionMode::Cot ? "COT" : "TOT"; }

StageOutcome structure_stage(const Gateway& gateway, const std::string& prompt, const std::string& key,
                             ProspectionMode mode) {
  auto asked = ask_json<ProspectionStructure>(
      gateway, prompt, key, [mode](const json& j) { return ProspectionStructure::from_json(mode, j); });
  StageOutcome out;
  out.calls = asked.calls;
  if (asked.ok()) {
    out.structure = std::move(asked.value);
    return out;
  }
  out.failure = asked.failure;
  if (asked.gateway_error) {
    out.error = asked.gateway_error;
  } else if (asked.last_error == ErrorCode::InvalidTree) {
    out.error = ErrorCode::InvalidTree;
  } else {
    out.error = ErrorCode::UnparseableAfterRetry;
  }
  return out;
}

std::string stage_note(const char* stage, const StageOutcome& s) {
  return std::string(stage) + " failed (" + std::string(to_string(*s.error)) + "): " + s.failure;
}

json params_json(const RetrievalParams& p) { return {{"k", p.k}, {"tau", p.tau}}; }

RetrievalParams params_from_json(const json& j, RetrievalParams base, const char* name) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be an object");
  try {
    if (j.contains("k")) base.k = j.at("k").get<int>();
    if (j.contains("tau")) base.tau = j.at("tau").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string(name) + ": " + e.what());
  }
  return base;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void PGRConfig::validate() const {
  if (delta_threshold < 0) throw Error(ErrorCode::InvalidConfig, "delta_threshold must be >= 0");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
  try {
    probe_params.validate();
    augment_params.validate();
    query_only_params.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.detail());
  }
}

json to_json(const PGRConfig& c) {
  return {{"mode", std::string(to_string(c.mode))},
          {"delta_threshold", c.delta_threshold},
          {"max_iterations", c.max_iterations},
          {"probe_params", params_json(c.probe_params)},
          {"augment_params", params_json(c.augment_params)},
          {"query_only_params", params_json(c.query_only_params)},
          {"iterative", c.iterative},
          {"use_summary", c.use_summary},
          {"probe_with_constraints", c.probe_with_constraints}};
}

PGRConfig pgr_config_from_json(const json& j, PGRConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "prospection config must be an object");
  static const std::set<std::string> known{"mode",          "delta_threshold",   "max_iterations",
                                           "probe_params",  "augment_params",    "query_only_params",
                                           "iterative",     "use_summary",       "probe_with_constraints"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown prospection key '" + key + "'");
  }
  try {
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("delta_threshold")) c.delta_threshold = j["delta_threshold"].get<int>();
    if (j.contains("max_iterations")) c.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("iterative")) c.iterative = j["iterative"].get<bool>();
    if (j.contains("use_summary")) c.use_summary = j["use_summary"].get<bool>();
    if (j.contains("probe_with_constraints")) c.probe_with_constraints = j["probe_with_constraints"].get<bool>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.detail());
  }
  if (j.contains("probe_params")) c.probe_params = params_from_json(j["probe_params"], c.probe_params, "probe_params");
  if (j.contains("augment_params"))
    c.augment_params = params_from_json(j["augment_params"], c.augment_params, "augment_params");
  if (j.contains("query_only_params"))
    c.query_only_params = params_from_json(j["query_only_params"], c.query_only_params, "query_only_params");
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Result helpers

std::vector<std::string> PGRResult::final_fids() const {
  std::vector<std::string> out;
  for (const auto& sf : final_facts) out.push_back(sf.fact->fid);
  return out;
}

std::vector<FactPtr> PGRResult::final_fact_ptrs() const {
  std::vector<FactPtr> out;
  for (const auto& sf : final_facts) out.push_back(sf.fact);
  return out;
}

std::string augment_key(const std::string& qid) { return "AUG:" + qid; }
std::string phase1_key(ProspectionMode m, const std::string& qid) { return "P1-" + mode_tag(m) + ":" + qid; }
std::string refine_key(ProspectionMode m, int i, const std::string& qid) {
  return "REF" + std::to_string(i) + "-" + mode_tag(m) + ":" + qid;
}
std::string summary_key(const std::string& qid) { return "SUM:" + qid; }

// ---------------------------------------------------------------------------
// Stages

AugmentOutcome augment_query(const Gateway& gateway, const MemoryStore& store, const std::string& q, Date date,
                             const RetrievalParams& params, const std::string& query_id) {
  if (q.empty()) throw Error(ErrorCode::EmptyQuery, "query text is empty");
  AugmentOutcome out;
  std::vector<FactPtr> context;
  for (const auto& sf : store.retrieve(q, params)) {
    context.push_back(sf.fact);
    out.context_fids.push_back(sf.fact->fid);
  }
  std::string prompt = render(TemplateId::QueryAugment, {{"query_date", date.to_string()},
                                                         {"context", format_fact_lines(context, "-")},
                                                         {"query", q}});
  out.calls = 1;
  try {
    out.text = gateway.complete(gateway.make_request(std::move(prompt), augment_key(query_id)));
  } catch (const Error& e) {
    if (!is_gateway_failure(e.code())) throw;
    out.note = std::string("query augmentation failed, using the original query: ") + e.what();
  }
  // Trim surrounding whitespace; an empty completion is no augmentation.
  auto b = out.text.find_first_not_of(" \t\r\n");
  out.text = b == std::string::npos ? std::string() : out.text.substr(b, out.text.find_last_not_of(" \t\r\n") - b + 1);
  if (out.text.empty()) {
    if (out.note.empty()) out.note = "query augmentation returned empty text, using the original query";
    out.text = q;
  }
  return out;
}

StageOutcome generate_initial(const Gateway& gateway, const std::string& q_a, Date date, ProspectionMode mode,
                              const std::string& query_id) {
  std::string prompt = render(phase1_template(mode),
                              {{"query_date", date.to_string()}, {"query", q_a}, {"main_query_context", ""}});
  return structure_stage(gateway, prompt, phase1_key(mode, query_id), mode);
}

std::vector<ScoredFact> probe(const ProspectionStructure& structure, const MemoryStore& store,
                              const RetrievalParams& params, bool with_constraints,
                              std::vector<ProbeRecord>* records) {
  FactSet set;
  for (const auto& step : structure.probe_steps()) {
    ProbeRecord rec{probe_text(step, with_constraints), params, {}};
    for (const auto& sf : store.retrieve(rec.text, params)) {
      rec.hits.emplace_back(sf.fact->fid, sf.score);
      set.add(sf);
    }
    if (records) records->push_back(std::move(rec));
  }
  return set.items();
}

StageOutcome refine(const Gateway& gateway, const std::string& q_a, const std::vector<FactPtr>& facts_so_far,
                    const ProspectionStructure& previous, Date date, int iteration, const std::string& query_id) {
  std::string prompt = render(phase2_template(previous.mode),
                              {{"query_date", date.to_string()},
                               {"query", q_a},
                               {"initial_steps_json", previous.to_json().dump(2)},
                               {"retrieved_context", format_fact_lines(facts_so_far, kNoFactsYet)}});
  StageOutcome out = structure_stage(gateway, prompt, refine_key(previous.mode, iteration, query_id), previous.mode);
  if (!out.structure) out.structure = previous;
  return out;
}

SummaryOutcome summarize_prospection(const Gateway& gateway, const std::vector<ProspectionStructure>& structures,
                                     const std::string& q_a, Date date, const std::string& query_id) {
  if (structures.empty()) throw Error(ErrorCode::InvalidArgument, "summary needs at least one structure");
  json list = json::array();
  for (const auto& s : structures) list.push_back(s.to_json());
  std::string prompt = render(TemplateId::ProspectionSummary,
                              {{"query_date", date.to_string()}, {"query", q_a}, {"structures_json", list.dump(2)}});
  SummaryOutcome out;
  out.calls = 1;
  try {
    out.text = gateway.complete(gateway.make_request(std::move(prompt), summary_key(query_id)));
  } catch (const Error& e) {
    if (!is_gateway_failure(e.code())) throw;
    out.note = std::string("prospection summary failed: ") + e.what();
    out.text.clear();
  }
  return out;
}

// ---------------------------------------------------------------------------
// The prospection loop

PGRResult run_pgr(const std::string& q, Date date, const MemoryStore& store, const Gateway& gateway,
                  const PGRConfig& config, const std::string& query_id) {
  config.validate();
  PGRResult result;
  result.query_id = query_id;
  result.query = q;
  result.query_date = date;

  AugmentOutcome aug = augment_query(gateway, store, q, date, config.augment_params, query_id);
  result.augmented_query = aug.text;
  result.augment_calls = aug.calls;
  result.augment_context_fids = aug.context_fids;
  if (!aug.note.empty()) result.notes.push_back(aug.note);

  FactSet r;
  IterationRecord phase1;
  phase1.iteration = 0;
  StageOutcome s0 = generate_initial(gateway, result.augmented_query, date, config.mode, query_id);
  phase1.llm_calls = s0.calls;
  if (s0.structure) {
    phase1.structure = std::move(*s0.structure);
  } else {
    phase1.structure = ProspectionStructure::empty_of(config.mode);
    phase1.degraded = true;
    phase1.notes.push_back(stage_note("phase-1 prospection", s0));
  }

  ProbeRecord query_probe{q, config.query_only_params, {}};
  for (const auto& sf : store.retrieve(q, config.query_only_params)) {
    query_probe.hits.emplace_back(sf.fact->fid, sf.score);
    if (r.add(sf)) phase1.new_fact_ids.push_back(sf.fact->fid);
  }
  phase1.probes.push_back(std::move(query_probe));
  for (const auto& sf :
       probe(phase1.structure, store, config.probe_params, config.probe_with_constraints, &phase1.probes)) {
    if (r.add(sf)) phase1.new_fact_ids.push_back(sf.fact->fid);
  }
  result.trace.push_back(std::move(phase1));

  if (config.iterative) {
    for (int i = 1; i <= config.max_iterations; ++i) {
      IterationRecord rec;
      rec.iteration = i;
      StageOutcome si =
          refine(gateway, result.augmented_query, r.facts(), result.trace.back().structure, date, i, query_id);
      rec.llm_calls = si.calls;
      rec.structure = std::move(*si.structure);
      if (si.error) {
        rec.degraded = true;
        rec.notes.push_back(stage_note("refinement", si) + "; keeping the previous structure");
      }
      for (const auto& sf : probe(rec.structure, store, config.probe_params, config.probe_with_constraints,
                                  &rec.probes)) {
        if (r.add(sf)) rec.new_fact_ids.push_back(sf.fact->fid);
      }
      bool converged = static_cast<int>(rec.new_fact_ids.size()) < config.delta_threshold;
      result.trace.push_back(std::move(rec));
      if (converged) break;
    }
  }

  if (config.use_summary) {
    std::vector<ProspectionStructure> structures;
    for (const auto& rec : result.trace) structures.push_back(rec.structure);
    SummaryOutcome sum = summarize_prospection(gateway, structures, result.augmented_query, date, query_id);
    result.summary = std::move(sum.text);
    result.summary_calls = sum.calls;
    if (!sum.note.empty()) result.notes.push_back(sum.note);
  }

  result.final_facts = r.items();
  return result;
}

LlmCallCounts count_llm_calls(const PGRResult& result) {
  LlmCallCounts c;
  c.augment = result.augment_calls;
  c.summary = result.summary_calls;
  for (const auto& rec : result.trace) {
    if (rec.iteration == 0) {
      c.phase1 += rec.llm_calls;
    } else {
      c.refinements += rec.llm_calls;
    }
  }
  return c;
}

json to_json(const PGRResult& r) {
  json trace = json::array();
  for (const auto& rec : r.trace) {
    json probes = json::array();
    for (const auto& p : rec.probes) {
      json hits = json::array();
      for (const auto& [fid, score] : p.hits) hits.push_back({{"fid", fid}, {"score", score}});
      probes.push_back({{"text", p.text}, {"k", p.params.k}, {"tau", p.params.tau}, {"hits", hits}});
    }
    trace.push_back({{"iteration", rec.iteration},
                     {"structure", rec.structure.to_json()},
                     {"probes", probes},
                     {"new_fact_ids", rec.new_fact_ids},
                     {"delta_size", rec.new_fact_ids.size()},
                     {"llm_calls", rec.llm_calls},
                     {"degraded", rec.degraded},
                     {"notes", rec.notes}});
  }
  json facts = json::array();
  for (const auto& sf : r.final_facts) {
    facts.push_back({{"fid", sf.fact->fid}, {"score", sf.score}, {"line", format_fact_line(*sf.fact)}});
  }
  LlmCallCounts calls = count_llm_calls(r);
  std::string mode = r.trace.empty() ? "" : std::string(to_string(r.trace.front().structure.mode));
  return {{"query_id", r.query_id},
          {"query", r.query},
          {"query_date", r.query_date.to_string()},
          {"mode", mode},
          {"augmented_query", r.augmented_query},
          {"augment_context_fids", r.augment_context_fids},
          {"trace", trace},
          {"final_facts", facts},
          {"summary", r.summary},
          {"llm_calls",
           {{"augment", calls.augment},
            {"phase1", calls.phase1},
            {"refinements", calls.refinements},
            {"summary", calls.summary},
            {"total", calls.total()}}},
          {"notes", r.notes}};
}

void write_trace(const PGRResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto path = dir / (r.query_id + ".json");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json(r).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace pgr
