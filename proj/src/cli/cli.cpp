#include "pgr/cli/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "pgr/answer/answer.hpp"
#include "pgr/benchgen/benchgen.hpp"
#include "pgr/benchgen/synth.hpp"
#include "pgr/cli/config.hpp"
#include "pgr/eval/harness.hpp"
#include "pgr/extraction/extraction.hpp"
#include "pgr/memory/consolidation.hpp"

namespace pgr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Flags shared by every subcommand that runs the pipeline.
struct Common {
  std::string config_path;
  std::string output_dir;
  std::string run_id;
  std::string store;
  std::string scripted;
  std::string judge_scripted;
};

void add_common(CLI::App* sub, Common& c, bool with_store) {
  sub->add_option("--config", c.config_path, "JSON run configuration");
  sub->add_option("--output-dir", c.output_dir, "Directory that receives run directories");
  sub->add_option("--run-id", c.run_id, "Run directory name (default: timestamp)");
  sub->add_option("--scripted", c.scripted, "Use a scripted backend from this JSON file");
  if (with_store) sub->add_option("--store", c.store, "Memory store directory");
}

std::string timestamp_run_id() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "run-%Y%m%d-%H%M%S", &tm);
  return buf;
}

Date today() {
  auto days = std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now());
  std::chrono::year_month_day ymd{days};
  return Date::from_ymd(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()));
}

BackendConfig scripted_backend(const std::string& path) {
  BackendConfig b;
  b.kind = BackendKind::Scripted;
  b.script_path = path;
  b.retry.backoff_ms = 0;
  return b;
}

// Flags > config file > defaults.
RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path);
  if (!c.store.empty()) cfg.store_path = c.store;
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  if (!c.scripted.empty()) cfg.backend = scripted_backend(c.scripted);
  if (!c.judge_scripted.empty()) cfg.judge_backend = scripted_backend(c.judge_scripted);
  return cfg;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<Gateway> generation_gateway(const RunConfig& cfg) {
  if (!cfg.backend) throw UsageError("no backend configured: pass --scripted FILE or a config with \"backend\"");
  return Gateway::from_config(*cfg.backend);
}

std::shared_ptr<Gateway> judge_gateway(const RunConfig& cfg, const std::shared_ptr<Gateway>& generation) {
  if (cfg.judge_backend) return Gateway::from_config(*cfg.judge_backend);
  return generation;
}

std::string require_store(const RunConfig& cfg) {
  if (cfg.store_path.empty()) throw UsageError("no store: pass --store DIR or set store_path");
  return cfg.store_path;
}

struct RunDir {
  std::string id;
  fs::path path;
};

RunDir open_run(const RunConfig& cfg, const Common& c, const json& extra = json::object()) {
  RunDir r;
  r.id = c.run_id.empty() ? timestamp_run_id() : c.run_id;
  r.path = fs::path(cfg.output_dir) / r.id;
  fs::create_directories(r.path);
  json resolved = to_json(cfg);
  resolved["run_id"] = r.id;
  for (const auto& [k, v] : extra.items()) resolved[k] = v;
  std::ofstream out(r.path / "config.resolved.json");
  out << resolved.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write config.resolved.json");
  return r;
}

std::unique_ptr<MemoryStore> open_store(const std::string& dir, const Gateway& gateway, bool create) {
  auto embedder = gateway.routed_embedder();
  if (fs::exists(fs::path(dir) / "meta.json")) return MemoryStore::load(dir, embedder);
  if (!create) throw Error(ErrorCode::IoError, "no store at " + dir);
  return std::make_unique<MemoryStore>(embedder);
}

PendingOptions pending_options(const RunConfig& cfg, std::ostream* audit, bool force) {
  PendingOptions p;
  p.cadence = force ? 1 : cfg.extraction_cadence;
  p.consolidation = cfg.consolidation;
  p.audit = audit;
  return p;
}

void report_pending(const PendingOutcome& o, std::ostream& out, std::ostream& err) {
  if (!o.ran) {
    out << "extraction not due (cadence not reached)\n";
    return;
  }
  int added = 0, updated = 0;
  for (const auto& r : o.reports) {
    added += r.added;
    updated += r.updated;
  }
  out << "extracted " << o.reports.size() << " conversations: " << added << " added, " << updated << " updated\n";
  for (const auto& b : o.batches) {
    for (const auto& w : b.warnings) err << "warning: " << b.conversation_id << ": " << w << '\n';
  }
  for (const auto& [id, why] : o.failures) err << "warning: " << id << " left pending: " << why << '\n';
  if (o.consolidation && o.consolidation->triggered) {
    out << "consolidation merged " << o.consolidation->groups_merged << " groups\n";
  }
}

void apply_pgr_flags(PGRConfig& p, const std::string& mode, bool no_iter, bool no_summary) {
  if (!mode.empty()) p.mode = parse_mode(mode);
  if (no_iter) p.iterative = false;
  if (no_summary) p.use_summary = false;
}

// ---------------------------------------------------------------------------
// trace show

std::string fact_line_for(const json& trace, const std::string& fid) {
  for (const auto& f : trace["final_facts"]) {
    if (f["fid"] == fid) return f["line"].get<std::string>();
  }
  return fid;
}

void draw_tree(const json& nodes, std::ostream& out) {
  std::map<std::string, json> by_id;
  std::string root;
  for (const auto& n : nodes) {
    by_id[n["action_id"].get<std::string>()] = n;
    if (n["parent"].is_null()) root = n["action_id"].get<std::string>();
  }
  auto label = [&](const json& n) {
    std::string s = n["action_id"].get<std::string>() + ": " + n["action"].get<std::string>();
    std::string c = n.value("constraints", "");
    if (!c.empty()) s += " [" + c + "]";
    return s;
  };
  std::function<void(const std::string&, const std::string&, bool, bool)> walk =
      [&](const std::string& id, const std::string& prefix, bool last, bool is_root) {
        const json& n = by_id.at(id);
        out << (is_root ? "  " : prefix + (last ? "└── " : "├── ")) << label(n) << '\n';
        std::string child_prefix = is_root ? "  " : prefix + (last ? "    " : "│   ");
        const auto& kids = n["children"];
        for (std::size_t i = 0; i < kids.size(); ++i) {
          walk(kids[i].get<std::string>(), child_prefix, i + 1 == kids.size(), false);
        }
      };
  if (!root.empty()) walk(root, "", true, true);
}

void render_trace(const json& t, const std::optional<json>& answer, std::ostream& out) {
  out << "Query [" << t["query_id"].get<std::string>() << ", " << t["query_date"].get<std::string>()
      << "]: " << t["query"].get<std::string>() << '\n';
  out << "Augmented query: " << t["augmented_query"].get<std::string>() << "\n\n";
  std::string mode = t.value("mode", "");
  std::string tag = mode == "cot" ? "COT" : "TOT";
  for (const auto& rec : t["trace"]) {
    int i = rec["iteration"].get<int>();
    if (i == 0) {
      out << "Phase 1 - Initial " << tag << '\n';
    } else {
      out << "Iteration " << i << " - Personalized " << tag << '\n';
    }
    if (mode == "cot") {
      int n = 0;
      for (const auto& s : rec["structure"]) {
        out << "  " << ++n << ". " << s["action"].get<std::string>();
        std::string c = s.value("constraints", "");
        if (!c.empty()) out << " [" << c << "]";
        out << '\n';
      }
    } else {
      draw_tree(rec["structure"], out);
    }
    for (const auto& note : rec["notes"]) out << "  note: " << note.get<std::string>() << '\n';
    const auto& fresh = rec["new_fact_ids"];
    out << (i == 0 ? "Retrieved facts (" : "New facts (") << fresh.size() << "):\n";
    for (const auto& fid : fresh) out << "  " << fact_line_for(t, fid.get<std::string>()) << '\n';
    out << '\n';
  }
  const auto& calls = t["llm_calls"];
  out << "Final fact set: " << t["final_facts"].size() << " facts; LLM calls: augment " << calls["augment"]
      << ", phase 1 " << calls["phase1"] << ", refinements " << calls["refinements"] << ", summary "
      << calls["summary"] << '\n';
  std::string summary = t.value("summary", "");
  if (!summary.empty()) out << "\nProspection summary:\n" << summary << '\n';
  for (const auto& note : t["notes"]) out << "note: " << note.get<std::string>() << '\n';
  if (answer) {
    out << "\nAnswer:\n" << (*answer)["answer"].get<std::string>() << '\n';
  }
}

std::optional<fs::path> find_trace(const fs::path& run, const std::string& qid) {
  fs::path direct = run / "trace" / (qid + ".json");
  if (fs::exists(direct)) return direct;
  if (fs::is_directory(run / "trace")) {
    for (const auto& e : fs::recursive_directory_iterator(run / "trace")) {
      if (e.path().filename() == qid + ".json") return e.path();
    }
  }
  return std::nullopt;
}

std::optional<json> find_answer(const fs::path& answers_file, const std::string& qid) {
  if (!fs::exists(answers_file)) return std::nullopt;
  for (const auto& a : read_answers(answers_file)) {
    if (a.query_id == qid) return to_json(a);
  }
  return std::nullopt;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Prospection-guided retrieval over a long-term fact store", "pgr"};
  app.require_subcommand(1);

  // ingest
  Common ingest_c;
  std::vector<std::string> ingest_files;
  bool ingest_extract = false;
  auto* ingest = app.add_subcommand("ingest", "Append conversation logs (JSONL) to a store");
  add_common(ingest, ingest_c, true);
  ingest->add_option("conversations", ingest_files, "conversations.jsonl files")->required();
  ingest->add_flag("--extract", ingest_extract, "Run extraction when the cadence is reached");

  // extract
  Common extract_c;
  bool extract_force = false;
  auto* extract = app.add_subcommand("extract", "Extract facts from pending conversations");
  add_common(extract, extract_c, true);
  extract->add_flag("--force", extract_force, "Process pending logs even below the cadence");

  // consolidate
  Common cons_c;
  bool cons_force = false;
  auto* consolidate = app.add_subcommand("consolidate", "Merge near-duplicate recent facts");
  add_common(consolidate, cons_c, true);
  consolidate->add_flag("--force", cons_force, "Run even if the new-fact trigger is not reached");

  // query
  Common query_c;
  std::string q, q_date, q_id = "q1", q_mode;
  bool q_no_iter = false, q_no_summary = false;
  auto* query = app.add_subcommand("query", "Run PGR and answer one query");
  add_common(query, query_c, true);
  query->add_option("--q", q, "Query text")->required();
  query->add_option("--date", q_date, "Query date YYYY-MM-DD (default: today)");
  query->add_option("--qid", q_id, "Query id (keys traces and scripted entries)");
  query->add_option("--mode", q_mode, "cot or tot")->check(CLI::IsMember({"cot", "tot"}));
  query->add_flag("--no-iterative", q_no_iter, "Skip the refinement loop");
  query->add_flag("--no-summary", q_no_summary, "Answer without the prospection summary");

  // chat
  Common chat_c;
  std::string chat_date, chat_mode;
  auto* chat = app.add_subcommand("chat", "Interactive REPL; each exchange is logged to the store");
  add_common(chat, chat_c, true);
  chat->add_option("--date", chat_date, "Session date YYYY-MM-DD (default: today)");
  chat->add_option("--mode", chat_mode, "cot or tot")->check(CLI::IsMember({"cot", "tot"}));

  // benchgen
  Common bg_c;
  std::string bg_out, bg_profiles;
  std::uint64_t bg_seed = 1;
  double bg_gamma = 0.3;
  int bg_users = 5, bg_facts = 100, bg_queries = 3, bg_candidates = 30, bg_nmax = 15, bg_jobs = 1;
  bool bg_synthetic = false, bg_llm = false;
  auto* benchgen = app.add_subcommand("benchgen", "Generate a benchmark dataset");
  add_common(benchgen, bg_c, false);
  benchgen->add_option("--out", bg_out, "Dataset directory")->required();
  benchgen->add_option("--seed", bg_seed, "Seed for --synthetic");
  benchgen->add_option("--gamma", bg_gamma, "Similarity bottleneck for --llm");
  auto* syn_flag = benchgen->add_flag("--synthetic", bg_synthetic, "Template world, no LLM");
  auto* llm_flag = benchgen->add_flag("--llm", bg_llm, "Three-step LLM pipeline over --profiles");
  syn_flag->excludes(llm_flag);
  benchgen->add_option("--users", bg_users, "Users (--synthetic)");
  benchgen->add_option("--facts", bg_facts, "Facts per user (--synthetic)");
  benchgen->add_option("--queries", bg_queries, "Queries per user (--synthetic)");
  benchgen->add_option("--profiles", bg_profiles, "PersonaProfile JSONL (--llm)");
  benchgen->add_option("--candidates", bg_candidates, "Candidate queries per profile (--llm)");
  benchgen->add_option("--max-queries", bg_nmax, "Queries kept per profile (--llm)");
  benchgen->add_option("--jobs", bg_jobs, "Parallel users")->check(CLI::PositiveNumber);

  // eval
  Common ev_c;
  std::string ev_data, ev_pair_a, ev_pair_b, ev_mode;
  std::vector<std::string> ev_arms;
  bool ev_oracle = false, ev_judged = false, ev_pairwise = false;
  int ev_jobs = 1;
  auto* eval = app.add_subcommand("eval", "Evaluate retrieval arms over a dataset");
  add_common(eval, ev_c, false);
  eval->add_option("--judge-scripted", ev_c.judge_scripted, "Scripted judge backend");
  eval->add_option("--data", ev_data, "Dataset directory (users/<id>/...)")->required();
  eval->add_option("--arm", ev_arms, "Arm: query-only, pgr[-cot|-tot][-base][-nosum]")->required();
  auto* oracle_flag = eval->add_flag("--oracle", ev_oracle, "Id-based recall (fixture worlds)");
  auto* judged_flag = eval->add_flag("--judged", ev_judged, "LLM-judged recall");
  oracle_flag->excludes(judged_flag);
  eval->add_flag("--pairwise", ev_pairwise, "Pairwise win rate between two arms");
  eval->add_option("--pair-a", ev_pair_a, "First pairwise arm (default: first --arm)");
  eval->add_option("--pair-b", ev_pair_b, "Second pairwise arm (default: second --arm)");
  eval->add_option("--mode", ev_mode, "Default mode for plain 'pgr'")->check(CLI::IsMember({"cot", "tot"}));
  eval->add_option("--jobs", ev_jobs, "Parallel cases")->check(CLI::PositiveNumber);

  // trace show
  std::string tr_qid, tr_run;
  auto* trace = app.add_subcommand("trace", "Inspect traces");
  trace->require_subcommand(1);
  auto* show = trace->add_subcommand("show", "Render a query trace");
  show->add_option("query_id", tr_qid, "Query id")->required();
  show->add_option("--run", tr_run, "Run directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      RunConfig cfg = resolve(ingest_c);
      cfg.validate();
      auto gw = generation_gateway(cfg);
      std::string dir = require_store(cfg);
      auto store = open_store(dir, *gw, true);
      int n = 0;
      for (const auto& f : ingest_files) {
        for (auto& log : read_conversations(f)) {
          store->add_conversation(std::move(log));
          ++n;
        }
      }
      out << "ingested " << n << " conversations; " << store->pending_conversations().size() << " pending\n";
      if (ingest_extract) {
        RunDir run = open_run(cfg, ingest_c, {{"command", "ingest"}});
        std::ofstream audit(run.path / "extraction_audit.jsonl");
        report_pending(process_pending(*store, gw, pending_options(cfg, &audit, false)), out, err);
      }
      store->save(dir);
      return kExitOk;
    }
    if (extract->parsed()) {
      RunConfig cfg = resolve(extract_c);
      cfg.validate();
      auto gw = generation_gateway(cfg);
      std::string dir = require_store(cfg);
      auto store = open_store(dir, *gw, false);
      RunDir run = open_run(cfg, extract_c, {{"command", "extract"}});
      std::ofstream audit(run.path / "extraction_audit.jsonl");
      PendingOutcome o = process_pending(*store, gw, pending_options(cfg, &audit, extract_force));
      report_pending(o, out, err);
      store->save(dir);
      return o.failures.empty() ? kExitOk : kExitDomainError;
    }
    if (consolidate->parsed()) {
      RunConfig cfg = resolve(cons_c);
      cfg.validate();
      auto gw = generation_gateway(cfg);
      std::string dir = require_store(cfg);
      auto store = open_store(dir, *gw, false);
      open_run(cfg, cons_c, {{"command", "consolidate"}});
      ConsolidationParams p = cfg.consolidation;
      p.force = cons_force;
      MergeReport r = store->consolidate(p, llm_fact_merger(gw));
      if (!r.triggered) {
        out << "consolidation not due (" << store->new_fact_counter() << " new facts, trigger " << p.trigger_count
            << ")\n";
      } else {
        out << "merged " << r.groups_merged << " groups, removed " << r.facts_removed << " facts\n";
        for (const auto& g : r.failed_groups) err << "warning: merge failed for " << g.size() << " facts\n";
      }
      store->save(dir);
      return kExitOk;
    }
    if (query->parsed()) {
      RunConfig cfg = resolve(query_c);
      apply_pgr_flags(cfg.pgr, q_mode, q_no_iter, q_no_summary);
      cfg.validate();
      auto gw = generation_gateway(cfg);
      auto store = open_store(require_store(cfg), *gw, false);
      Date date = q_date.empty() ? today() : Date::parse_or_throw(q_date);
      RunDir run = open_run(cfg, query_c, {{"command", "query"}, {"query", q}, {"query_id", q_id}});
      PGRResult r = run_pgr(q, date, *store, *gw, cfg.pgr, q_id);
      write_trace(r, run.path / "trace");
      AnswerInputs ai{q_id, q, date, r.final_fact_ptrs(), r.summary, cfg.pgr.use_summary, ""};
      AnswerRecord a = generate_answer(*gw, ai);
      write_answers({a}, run.path / "answers" / (run.id + ".jsonl"));
      for (const auto& note : r.notes) err << "note: " << note << '\n';
      out << a.answer << '\n';
      out << "run: " << run.path.string() << '\n';
      return kExitOk;
    }
    if (chat->parsed()) {
      RunConfig cfg = resolve(chat_c);
      apply_pgr_flags(cfg.pgr, chat_mode, false, false);
      cfg.validate();
      auto gw = generation_gateway(cfg);
      std::string dir = require_store(cfg);
      auto store = open_store(dir, *gw, true);
      Date date = chat_date.empty() ? today() : Date::parse_or_throw(chat_date);
      RunDir run = open_run(cfg, chat_c, {{"command", "chat"}});
      std::ofstream audit(run.path / "extraction_audit.jsonl");
      std::vector<AnswerRecord> answers;
      std::string line;
      int turn = 0;
      out << "pgr chat; empty line or /quit to exit\n";
      while (out << "> " << std::flush, std::getline(in, line)) {
        if (line.empty() || line == "/quit") break;
        std::string qid = "chat-" + std::to_string(++turn);
        PGRResult r = run_pgr(line, date, *store, *gw, cfg.pgr, qid);
        write_trace(r, run.path / "trace");
        AnswerRecord a = generate_answer(*gw, {qid, line, date, r.final_fact_ptrs(), r.summary, cfg.pgr.use_summary, ""});
        out << a.answer << '\n';
        answers.push_back(a);
        // The exchange enters memory through the normal ingestion path.
        store->add_conversation({run.id + "-" + qid, date, {{Speaker::User, line}, {Speaker::Agent, a.answer}}});
        report_pending(process_pending(*store, gw, pending_options(cfg, &audit, false)), out, err);
        store->save(dir);
      }
      write_answers(answers, run.path / "answers" / (run.id + ".jsonl"));
      store->save(dir);
      return kExitOk;
    }
    if (benchgen->parsed()) {
      if (!bg_synthetic && !bg_llm) throw UsageError("benchgen needs --synthetic or --llm");
      RunConfig cfg = resolve(bg_c);
      cfg.validate();
      if (bg_synthetic) {
        SynthWorld w = synth_world({bg_seed, bg_users, bg_facts, bg_queries});
        write_synth_world(w, bg_out);
        int cases = 0;
        for (const auto& u : w.users) cases += static_cast<int>(u.cases.size());
        json meta{{"mode", "synthetic"}, {"seed", bg_seed}, {"users", bg_users}, {"facts_per_user", bg_facts},
                  {"queries_per_user", bg_queries}};
        std::ofstream(fs::path(bg_out) / "config.resolved.json") << meta.dump(2) << '\n';
        out << "wrote " << w.users.size() << " users, " << cases << " cases to " << bg_out << '\n';
        return kExitOk;
      }
      if (bg_profiles.empty()) throw UsageError("--llm needs --profiles FILE");
      auto gw = generation_gateway(cfg);
      std::vector<PersonaProfile> profiles;
      std::ifstream pin(bg_profiles);
      if (!pin) throw Error(ErrorCode::IoError, "cannot read " + bg_profiles);
      std::string line;
      while (std::getline(pin, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) profiles.push_back(persona_from_json(json::parse(line)));
      }
      LlmBenchOptions opts;
      opts.queries = {bg_candidates, bg_nmax, bg_gamma};
      opts.jobs = bg_jobs;
      LlmBenchReport rep = build_llm_dataset(*gw, gw->embedder(), profiles, opts, bg_out);
      json meta = to_json(cfg);
      meta["mode"] = "llm";
      meta["gamma"] = bg_gamma;
      meta["candidates"] = bg_candidates;
      meta["max_queries"] = bg_nmax;
      std::ofstream(fs::path(bg_out) / "config.resolved.json") << meta.dump(2) << '\n';
      for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
      out << "wrote " << rep.users << " users, " << rep.cases << " cases (" << rep.invalid_cases << " invalid) to "
          << bg_out << '\n';
      return kExitOk;
    }
    if (eval->parsed()) {
      RunConfig cfg = resolve(ev_c);
      if (!ev_mode.empty()) cfg.pgr.mode = parse_mode(ev_mode);
      cfg.validate();
      auto gw = generation_gateway(cfg);
      auto judge = judge_gateway(cfg, gw);
      EvalOptions opts;
      for (const auto& a : ev_arms) opts.arms.push_back(arm_from_name(a, cfg.pgr));
      opts.judged = ev_judged;
      opts.oracle = !ev_judged;
      opts.pairwise = ev_pairwise;
      opts.pair_a = ev_pair_a;
      opts.pair_b = ev_pair_b;
      opts.jobs = ev_jobs;
      auto users = load_dataset(ev_data, gw->routed_embedder());
      RunDir run = open_run(cfg, ev_c,
                            {{"command", "eval"}, {"data", ev_data}, {"arms", ev_arms},
                             {"metric", ev_judged ? "judged" : "oracle"}, {"pairwise", ev_pairwise}});
      EvalOutcome o = run_eval(users, *gw, *judge, opts);
      write_eval_outputs(o, opts, run.path);
      for (const auto& w : o.warnings) err << "warning: " << w << '\n';
      json rep = report_json(o, opts);
      for (const auto& name : o.arm_order) {
        const json& a = rep["arms"][name];
        out << name << ": n=" << a.value("n", 0);
        if (a.contains("mean_recall")) {
          out << " recall=" << a["mean_recall"].get<double>() << " recall_exact=" << a["mean_recall_exact"].get<double>();
        }
        out << '\n';
      }
      if (rep.contains("pairwise") && rep["pairwise"].contains("win_rate_percent")) {
        out << "win rate " << rep["pairwise"]["arm_a"].get<std::string>() << " vs "
            << rep["pairwise"]["arm_b"].get<std::string>() << ": "
            << rep["pairwise"]["win_rate_percent"].get<double>() << "%\n";
      }
      out << "run: " << run.path.string() << '\n';
      return kExitOk;
    }
    if (show->parsed()) {
      auto path = find_trace(tr_run, tr_qid);
      if (!path) throw Error(ErrorCode::IoError, "no trace for " + tr_qid + " under " + tr_run);
      std::ifstream tin(*path);
      json t = json::parse(tin);
      std::optional<json> answer;
      fs::path run(tr_run);
      if (fs::is_directory(run / "answers")) {
        // Eval runs keep one answers file per arm; the arm is the trace's parent directory name.
        std::string arm = path->parent_path().filename().string();
        for (const auto& e : fs::directory_iterator(run / "answers")) {
          if (answer) break;
          if (arm != "trace" && e.path().stem() != arm) continue;
          answer = find_answer(e.path(), tr_qid);
        }
      }
      render_trace(t, answer, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitDomainError;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitUsage;
}

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args);
}

}  // namespace pgr
