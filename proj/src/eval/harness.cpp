#include "pgr/eval/harness.hpp"

#include <algorithm>
#include <fstream>

#include "pgr/core/parallel.hpp"

namespace pgr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CaseRef {
  const UserData* user;
  const QueryCase* c;
};

std::vector<CaseRef> flatten(const std::vector<UserData>& users) {
  std::vector<CaseRef> out;
  for (const auto& u : users) {
    for (const auto& c : u.cases) out.push_back({&u, &c});
  }
  return out;
}

void write_lines(const fs::path& path, const std::vector<json>& lines) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& l : lines) out << l.dump() << '\n';
}

}  // namespace

ArmSpec arm_from_name(const std::string& name, const PGRConfig& base) {
  ArmSpec arm;
  arm.name = name;
  arm.query_only = base.query_only_params;
  if (name == "query-only") {
    arm.kind = ArmKind::QueryOnly;
    return arm;
  }
  if (name.rfind("pgr", 0) != 0) throw Error(ErrorCode::InvalidArgument, "unknown arm '" + name + "'");
  arm.kind = ArmKind::Pgr;
  arm.pgr = base;
  std::string rest = name.substr(3);
  while (!rest.empty()) {
    if (rest[0] != '-') throw Error(ErrorCode::InvalidArgument, "unknown arm '" + name + "'");
    auto next = rest.find('-', 1);
    std::string part = rest.substr(1, next == std::string::npos ? std::string::npos : next - 1);
    if (part == "cot") {
      arm.pgr.mode = ProspectionMode::Cot;
    } else if (part == "tot") {
      arm.pgr.mode = ProspectionMode::Tot;
    } else if (part == "base") {
      arm.pgr.iterative = false;
    } else if (part == "nosum") {
      arm.pgr.use_summary = false;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown arm modifier '" + part + "' in '" + name + "'");
    }
    rest = next == std::string::npos ? "" : rest.substr(next);
  }
  return arm;
}

std::string recall_judge_key(const std::string& arm, const std::string& qid) { return "EVAL:" + arm + ":" + qid; }
std::string answer_key(const std::string& arm, const std::string& qid) { return "ANS:" + arm + ":" + qid; }

ArmRun run_arm(const ArmSpec& arm, const QueryCase& c, const MemoryStore& store, const Gateway& gateway) {
  ArmRun run;
  run.arm = arm.name;
  run.query_id = c.query_id;
  if (arm.kind == ArmKind::QueryOnly) {
    for (const auto& sf : store.retrieve(c.query, arm.query_only)) {
      run.fids.push_back(sf.fact->fid);
      run.facts.push_back(sf.fact);
    }
    return run;
  }
  PGRResult r = run_pgr(c.query, c.query_date, store, gateway, arm.pgr, c.query_id);
  run.fids = r.final_fids();
  run.facts = r.final_fact_ptrs();
  run.summary = r.summary;
  run.pgr = std::move(r);
  return run;
}

std::vector<UserData> load_dataset(const fs::path& root, std::shared_ptr<const Embedder> embedder) {
  fs::path users_dir = root / "users";
  if (!fs::is_directory(users_dir)) throw Error(ErrorCode::IoError, "no users/ directory under " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(users_dir)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<UserData> out;
  for (const auto& d : dirs) {
    UserData u;
    if (fs::exists(d / "profile.json")) {
      u.profile = read_profile(d / "profile.json");
    } else {
      u.profile.user_id = d.filename().string();
    }
    if (!fs::is_directory(d / "store")) {
      throw Error(ErrorCode::IoError, (d / "store").string() + " missing; run ingest and extract first");
    }
    u.store = MemoryStore::load(d / "store", embedder);
    u.cases = read_cases(d / "cases.jsonl");
    for (auto& c : u.cases) {
      if (c.user_id.empty()) c.user_id = u.profile.user_id;
    }
    out.push_back(std::move(u));
  }
  return out;
}

EvalOutcome run_eval(const std::vector<UserData>& users, const Gateway& generation, const Gateway& judge,
                     const EvalOptions& options) {
  if (options.arms.empty()) throw Error(ErrorCode::InvalidArgument, "no arms selected");
  EvalOutcome out;
  const auto cases = flatten(users);
  for (const auto& cr : cases) {
    if (!out.case_users.emplace(cr.c->query_id, cr.user->profile.user_id).second) {
      throw Error(ErrorCode::DuplicateId, "query_id " + cr.c->query_id + " appears twice");
    }
  }

  std::string pair_a = options.pair_a, pair_b = options.pair_b;
  if (options.pairwise) {
    if (pair_a.empty() && options.arms.size() >= 1) pair_a = options.arms[0].name;
    if (pair_b.empty() && options.arms.size() >= 2) pair_b = options.arms[1].name;
    if (pair_a.empty() || pair_b.empty() || pair_a == pair_b) {
      throw Error(ErrorCode::InvalidArgument, "pairwise comparison needs two distinct arms");
    }
  }
  auto needs_answers = [&](const std::string& arm) { return options.pairwise && (arm == pair_a || arm == pair_b); };

  for (const auto& arm : options.arms) {
    if (out.arms.count(arm.name)) throw Error(ErrorCode::InvalidArgument, "arm " + arm.name + " listed twice");
    out.arm_order.push_back(arm.name);
    ArmResults& res = out.arms[arm.name];
    res.runs.resize(cases.size());
    res.recalls.resize(cases.size());
    std::vector<std::optional<AnswerRecord>> answers(cases.size());
    std::vector<std::string> warnings(cases.size());
    bool answer = needs_answers(arm.name);

    parallel_for(cases.size(), options.jobs, [&](std::size_t i) {
      const QueryCase& c = *cases[i].c;
      res.runs[i] = run_arm(arm, c, *cases[i].user->store, generation);
      const ArmRun& run = res.runs[i];
      if (options.judged) {
        res.recalls[i] =
            judge_recall(judge, c, format_fact_lines(run.facts, "(nothing retrieved)"), recall_judge_key(arm.name, c.query_id));
      } else if (options.oracle) {
        res.recalls[i] = oracle_recall(c, run.fids);
      }
      if (answer) {
        AnswerInputs in;
        in.query_id = c.query_id;
        in.query = c.query;
        in.date = c.query_date;
        in.facts = run.facts;
        in.summary = run.summary;
        in.use_summary = arm.kind == ArmKind::Pgr && arm.pgr.use_summary;
        in.match_key = answer_key(arm.name, c.query_id);
        try {
          answers[i] = generate_answer(generation, in);
        } catch (const Error& e) {
          warnings[i] = arm.name + "/" + c.query_id + ": answer failed: " + e.what();
        }
      }
    });

    for (auto& a : answers) {
      if (a) res.answers.push_back(std::move(*a));
    }
    for (auto& w : warnings) {
      if (!w.empty()) out.warnings.push_back(std::move(w));
    }
    if (options.oracle || options.judged) {
      try {
        res.report = aggregate(res.recalls);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoEvaluatedCases) throw;
        out.warnings.push_back(arm.name + ": no evaluated cases");
      }
    }
  }

  if (options.pairwise) {
    if (!out.arms.count(pair_a) || !out.arms.count(pair_b)) {
      throw Error(ErrorCode::InvalidArgument, "pairwise arms must be among the evaluated arms");
    }
    auto answer_map = [&](const std::string& arm) {
      std::map<std::string, const AnswerRecord*> m;
      for (const auto& a : out.arms.at(arm).answers) m[a.query_id] = &a;
      return m;
    };
    auto answers_a = answer_map(pair_a), answers_b = answer_map(pair_b);
    std::vector<std::optional<PairwiseOutcome>> pairs(cases.size());
    parallel_for(cases.size(), options.jobs, [&](std::size_t i) {
      const QueryCase& c = *cases[i].c;
      auto a = answers_a.find(c.query_id);
      auto b = answers_b.find(c.query_id);
      PairContext ctx;
      ctx.persona_text = cases[i].user->profile.persona_text();
      ctx.facts_text = format_references(c.required_references);
      ctx.date = c.query_date;
      ctx.arm_a = pair_a;
      ctx.arm_b = pair_b;
      if (a == answers_a.end() || b == answers_b.end()) {
        PairwiseOutcome o = make_pairwise(c.query_id, std::nullopt, std::nullopt);
        o.arm_a = pair_a;
        o.arm_b = pair_b;
        pairs[i] = std::move(o);
        return;
      }
      pairs[i] = judge_pair(judge, c, a->second->answer, b->second->answer, ctx);
    });
    for (auto& p : pairs) out.pairs.push_back(std::move(*p));
    try {
      out.pair_report = aggregate({}, out.pairs);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoEvaluatedCases) throw;
      out.warnings.push_back("pairwise: no evaluated cases");
    }
  }
  return out;
}

json report_json(const EvalOutcome& outcome, const EvalOptions& options) {
  json arms = json::object();
  for (const auto& name : outcome.arm_order) {
    const auto& res = outcome.arms.at(name);
    json a = res.report ? to_json(*res.report) : json::object();
    // Mean per-stage LLM calls over PGR runs.
    int runs = 0;
    LlmCallCounts sum;
    for (const auto& r : res.runs) {
      if (!r.pgr) continue;
      ++runs;
      auto c = count_llm_calls(*r.pgr);
      sum.augment += c.augment;
      sum.phase1 += c.phase1;
      sum.refinements += c.refinements;
      sum.summary += c.summary;
    }
    if (runs > 0) {
      a["mean_llm_calls"] = {{"augment", double(sum.augment) / runs},
                             {"phase1", double(sum.phase1) / runs},
                             {"refinements", double(sum.refinements) / runs},
                             {"summary", double(sum.summary) / runs},
                             {"total", double(sum.total()) / runs}};
    }
    arms[name] = std::move(a);
  }
  json out{{"metric", options.judged ? "judged" : (options.oracle ? "oracle" : "none")},
           {"arms", arms},
           {"cases", outcome.case_users.size()},
           {"warnings", outcome.warnings}};
  if (options.pairwise && !outcome.pairs.empty()) {
    json p{{"arm_a", outcome.pairs.front().arm_a}, {"arm_b", outcome.pairs.front().arm_b}};
    if (outcome.pair_report) p.update(to_json(*outcome.pair_report));
    out["pairwise"] = std::move(p);
  }
  return out;
}

void write_eval_outputs(const EvalOutcome& outcome, const EvalOptions& options, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw Error(ErrorCode::IoError, "cannot write report.json");
    out << report_json(outcome, options).dump(2) << '\n';
  }
  std::vector<json> recall_lines;
  for (const auto& name : outcome.arm_order) {
    const auto& res = outcome.arms.at(name);
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
      const auto& run = res.runs[i];
      json line{{"arm", name}, {"user_id", outcome.case_users.at(run.query_id)}, {"retrieved_fids", run.fids}};
      if (options.oracle || options.judged) line.update(to_json(res.recalls[i]));
      line["query_id"] = run.query_id;
      recall_lines.push_back(std::move(line));
      if (run.pgr) write_trace(*run.pgr, dir / "trace" / name);
    }
    if (!res.answers.empty()) write_answers(res.answers, dir / "answers" / (name + ".jsonl"));
  }
  write_lines(dir / "recall_details.jsonl", recall_lines);
  std::vector<json> pair_lines;
  for (const auto& p : outcome.pairs) pair_lines.push_back(to_json(p));
  write_lines(dir / "pairwise_details.jsonl", pair_lines);
}

}  // namespace pgr
