#include "pgr/benchgen/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "pgr/answer/answer.hpp"
#include "pgr/benchgen/benchgen.hpp"
#include "pgr/eval/harness.hpp"
#include "synth_data.hpp"

namespace pgr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kFactSpanDays = 120;
constexpr int kRefWindowStart = 60;
constexpr int kQueryDay = 125;

[[noreturn]] void infeasible(const std::string& why) { throw Error(ErrorCode::InfeasiblePlacement, why); }

// Plain modulo keeps the mapping identical on every standard library;
// mt19937_64's output sequence is fixed by the standard, distributions are not.
std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::string fill(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [name, value] : values) {
    const std::string slot = "{" + name + "}";
    for (auto pos = text.find(slot); pos != std::string::npos; pos = text.find(slot, pos + value.size())) {
      text.replace(pos, slot.size(), value);
    }
  }
  return text;
}

std::map<std::string, std::string> draw_vars(std::mt19937_64& rng, const std::vector<synth::Var>& vars) {
  std::map<std::string, std::string> out;
  for (const auto& v : vars) out[v.name] = v.options[pick(rng, v.options.size())];
  return out;
}

// "User's cat ..." -> "My cat ...", "User owns ..." -> "I owns ..." is close
// enough for a transcript line.
std::string first_person(const std::string& info) {
  if (info.rfind("User's ", 0) == 0) return "My " + info.substr(7);
  if (info.rfind("User ", 0) == 0) return "I " + info.substr(5);
  return info;
}

struct PlannedFact {
  std::string info;
  FactType type;
  int day;
  int frequency;
  int ref_case = -1;  // case index, or -1 for a distractor
  int ref_index = -1;
  std::size_t order;
};

struct PlannedCase {
  const synth::Scenario* scenario;
  std::map<std::string, std::string> vars;
  std::string query_id;
  std::string query;
  std::string goal;
  Date date;
  std::vector<std::string> ref_texts;
  std::vector<std::string> ref_fids;
  std::vector<Date> ref_dates;
};

json tree_json(const PlannedCase& c, bool refined) {
  json nodes = json::array();
  std::vector<std::string> root_children, branch_children;
  const auto& refs = c.scenario->refs;
  int next = 2;
  std::vector<std::pair<std::string, std::size_t>> ids;  // node id -> ref
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].phase == 1) ids.emplace_back("A" + std::to_string(next++), i);
  }
  std::size_t phase1 = ids.size();
  if (refined) {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (refs[i].phase == 2) ids.emplace_back("A" + std::to_string(next++), i);
    }
  }
  // Phase-1 nodes hang off the root; refinement nodes extend the first branch.
  for (std::size_t n = 0; n < ids.size(); ++n) (n < phase1 ? root_children : branch_children).push_back(ids[n].first);
  nodes.push_back({{"action_id", "A1"},
                   {"action", c.goal},
                   {"constraints", "date " + c.date.to_string()},
                   {"parent", nullptr},
                   {"children", root_children}});
  for (std::size_t n = 0; n < ids.size(); ++n) {
    const auto& r = refs[ids[n].second];
    bool under_root = n < phase1;
    nodes.push_back({{"action_id", ids[n].first},
                     {"action", fill(r.action, c.vars)},
                     {"constraints", fill(r.constraints, c.vars)},
                     {"parent", under_root ? "A1" : ids[0].first},
                     {"children", n == 0 ? json(branch_children) : json::array()}});
  }
  return nodes;
}

json chain_json(const PlannedCase& c, bool refined) {
  json steps = json::array();
  steps.push_back({{"action", c.goal}, {"constraints", "date " + c.date.to_string()}});
  for (int phase = 1; phase <= (refined ? 2 : 1); ++phase) {
    for (const auto& r : c.scenario->refs) {
      if (r.phase == phase) steps.push_back({{"action", fill(r.action, c.vars)}, {"constraints", fill(r.constraints, c.vars)}});
    }
  }
  return steps;
}

std::string summary_text(const PlannedCase& c) {
  std::string s = "The user starts from the goal to " + c.goal + ". The first simulation covered ";
  std::vector<std::string> p1, p2;
  for (const auto& r : c.scenario->refs) (r.phase == 1 ? p1 : p2).push_back(fill(r.action, c.vars));
  auto join = [](const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "; " : "") + xs[i];
    return out;
  };
  s += join(p1) + ". Refinement with personal facts added: " + join(p2) +
       ". The decision hinges on reconciling these constraints before committing.";
  return s;
}

json response(const std::string& text) { return {{"response", text}}; }

int refs_present(const PlannedCase& c, const std::set<std::string>& fids) {
  int n = 0;
  for (const auto& f : c.ref_fids) n += fids.count(f) ? 1 : 0;
  return n;
}

std::string answer_json(const PlannedCase& c, const std::set<std::string>& fids) {
  std::string reasoning, answer = "**" + c.goal + "**\n";
  for (std::size_t i = 0; i < c.ref_fids.size(); ++i) {
    if (!fids.count(c.ref_fids[i])) continue;
    reasoning += "- " + c.ref_texts[i] + "\n";
    answer += "- Accounting for: " + c.ref_texts[i] + "\n";
  }
  if (reasoning.empty()) reasoning = "- No stored facts bear directly on this request.\n";
  answer += "- Next step: confirm these details before committing.";
  return json{{"reasoning", reasoning}, {"answer", answer}}.dump();
}

}  // namespace

const std::vector<std::string>& synth_arms() {
  static const std::vector<std::string> arms{"query-only",   "pgr",          "pgr-tot",       "pgr-cot",
                                             "pgr-tot-base", "pgr-cot-base", "pgr-tot-nosum", "pgr-cot-nosum"};
  return arms;
}

SynthWorld synth_world(const SynthParams& params) {
  if (params.n_users < 1 || params.facts_per_user < 1 || params.queries_per_user < 1) {
    infeasible("synth_world parameters must be positive");
  }
  const auto& pool = synth::scenarios();
  if (params.queries_per_user > static_cast<int>(pool.size())) {
    infeasible("at most " + std::to_string(pool.size()) + " queries per user");
  }
  auto embedder = std::make_shared<HashingEmbedder>();
  SynthWorld world;
  world.script = json::object();
  std::vector<std::vector<PlannedCase>> planned(params.n_users);

  for (int u = 0; u < params.n_users; ++u) {
    std::mt19937_64 rng(params.seed * 1000003ULL + static_cast<std::uint64_t>(u + 1));
    const std::string uid = "u" + std::to_string(u + 1);
    const Date base = Date::from_ymd(2025, 1, 6).plus_days(7 * u);
    const auto& pp = synth::persona_pools();

    SynthUser user;
    user.profile.user_id = uid;
    std::string name = pp.first_names[pick(rng, pp.first_names.size())];
    std::string job = pp.occupations[pick(rng, pp.occupations.size())];
    std::string town = pp.hometowns[pick(rng, pp.hometowns.size())];
    std::string hobby = pp.hobbies[pick(rng, pp.hobbies.size())];
    user.profile.demographics =
        name + ", " + std::to_string(25 + pick(rng, 30)) + " years old, works as a " + job + " in " + town;
    user.profile.domain_summaries = {{"leisure", "Spends free time on " + hobby + "."},
                                     {"work", "Full-time " + job + "."}};

    // Scenario choice: partial Fisher-Yates over the pool.
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int j = 0; j < params.queries_per_user; ++j) std::swap(order[j], order[j + pick(rng, order.size() - j)]);

    std::vector<PlannedFact> facts;
    auto& cases = planned[u];
    for (int j = 0; j < params.queries_per_user; ++j) {
      PlannedCase c;
      c.scenario = &pool[order[j]];
      c.vars = draw_vars(rng, c.scenario->vars);
      c.query_id = uid + "-q" + std::to_string(j + 1);
      c.query = fill(c.scenario->query, c.vars);
      c.goal = fill(c.scenario->goal, c.vars);
      c.date = base.plus_days(kQueryDay + 2 * j);
      for (std::size_t r = 0; r < c.scenario->refs.size(); ++r) {
        const auto& spec = c.scenario->refs[r];
        int day = kRefWindowStart + static_cast<int>(pick(rng, kFactSpanDays - kRefWindowStart));
        facts.push_back({fill(spec.text, c.vars), spec.type, day, 1 + static_cast<int>(pick(rng, 3)), j,
                         static_cast<int>(r), facts.size()});
        c.ref_texts.push_back(facts.back().info);
        c.ref_dates.push_back(base.plus_days(day));
      }
      cases.push_back(std::move(c));
    }
    int n_distractors = params.facts_per_user - static_cast<int>(facts.size());
    if (n_distractors < 0) {
      infeasible(uid + ": " + std::to_string(facts.size()) + " reference facts exceed facts_per_user");
    }
    std::set<std::string> used;
    for (const auto& f : facts) used.insert(f.info);
    const auto& templates = synth::distractors();
    for (int d = 0; d < n_distractors; ++d) {
      std::string info;
      FactType type = FactType::Event;
      for (int attempt = 0;; ++attempt) {
        if (attempt == 1000) infeasible(uid + ": distractor templates exhausted");
        const auto& t = templates[pick(rng, templates.size())];
        info = fill(t.text, draw_vars(rng, t.vars));
        type = t.type;
        if (used.insert(info).second) break;
      }
      facts.push_back({info, type, static_cast<int>(pick(rng, kFactSpanDays)), 1 + static_cast<int>(pick(rng, 3)), -1,
                       -1, facts.size()});
    }
    std::stable_sort(facts.begin(), facts.end(), [](const PlannedFact& a, const PlannedFact& b) {
      return a.day != b.day ? a.day < b.day : a.order < b.order;
    });

    // One conversation per distinct day, fids in chronological order.
    user.store = std::make_shared<MemoryStore>(embedder);
    std::map<int, ConversationLog> logs;
    for (const auto& f : facts) {
      auto& log = logs[f.day];
      log.session_date = base.plus_days(f.day);
      log.turns.push_back({Speaker::User, first_person(f.info) + "."});
      log.turns.push_back({Speaker::Agent, "Thanks, I'll keep that in mind."});
    }
    std::map<int, std::string> conv_ids;
    int ci = 0;
    for (auto& [day, log] : logs) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "-c%03d", ++ci);
      log.conversation_id = uid + buf;
      conv_ids[day] = log.conversation_id;
      user.store->add_conversation(log);
    }
    user.store->clear_pending(user.store->pending_conversations());
    for (std::size_t i = 0; i < facts.size(); ++i) {
      const auto& f = facts[i];
      char buf[32];
      std::snprintf(buf, sizeof buf, "f%06zu", i + 1);
      Fact fact;
      fact.fid = buf;
      fact.info = f.info;
      fact.fact_type = f.type;
      fact.frequency = f.frequency;
      fact.conversation_ids = {conv_ids.at(f.day)};
      fact.created_date = fact.updated_date = base.plus_days(f.day);
      user.store->insert_fact(std::move(fact));
      if (f.ref_case >= 0) {
        auto& c = cases[f.ref_case];
        if (c.ref_fids.size() < c.ref_texts.size()) c.ref_fids.resize(c.ref_texts.size());
        c.ref_fids[f.ref_index] = buf;
      }
    }

    for (auto& c : cases) {
      FilterResult fr = similarity_filter(*embedder, c.query, c.ref_texts, 0.3);
      if (!fr.keep) infeasible(c.query_id + ": references average cosine " + std::to_string(fr.avg) + " > 0.3");
      for (std::size_t r = 0; r < c.ref_fids.size(); ++r) {
        const auto& spec = c.scenario->refs[r];
        std::string probe = probe_text({fill(spec.action, c.vars), fill(spec.constraints, c.vars)});
        bool reached = false;
        for (const auto& sf : user.store->retrieve(probe, RetrievalParams{5, 0.3})) reached |= sf.fact->fid == c.ref_fids[r];
        if (!reached) infeasible(c.query_id + ": reference " + c.ref_fids[r] + " unreachable from its step");
      }
      QueryCase qc;
      qc.query_id = c.query_id;
      qc.user_id = uid;
      qc.query = c.query;
      qc.query_date = c.date;
      for (std::size_t r = 0; r < c.ref_texts.size(); ++r) {
        qc.required_references.push_back({"r" + std::to_string(r + 1), c.ref_texts[r], c.ref_dates[r]});
      }
      qc.reference_fact_ids = c.ref_fids;
      user.cases.push_back(std::move(qc));

      auto& s = world.script;
      s[augment_key(c.query_id)] = response(c.goal + ", given what is known about the user.");
      s[phase1_key(ProspectionMode::Tot, c.query_id)] = response(tree_json(c, false).dump());
      s[phase1_key(ProspectionMode::Cot, c.query_id)] = response(chain_json(c, false).dump());
      // Identical second refinement: its probes find nothing new.
      for (int i = 1; i <= 2; ++i) {
        s[refine_key(ProspectionMode::Tot, i, c.query_id)] = response(tree_json(c, true).dump());
        s[refine_key(ProspectionMode::Cot, i, c.query_id)] = response(chain_json(c, true).dump());
      }
      s[summary_key(c.query_id)] = response(summary_text(c));
    }
    world.users.push_back(std::move(user));
  }

  // Run every arm over the prospection script to derive answers and judge
  // verdicts. The recall judge is plain membership of the reference fids.
  auto gateway = Gateway::scripted(world.script);
  PGRConfig base_cfg;
  json extra = json::object();
  for (int u = 0; u < params.n_users; ++u) {
    const auto& user = world.users[u];
    for (std::size_t j = 0; j < planned[u].size(); ++j) {
      const PlannedCase& c = planned[u][j];
      const QueryCase& qc = user.cases[j];
      std::map<std::string, std::set<std::string>> arm_fids;
      for (const auto& name : synth_arms()) {
        ArmRun run = run_arm(arm_from_name(name, base_cfg), qc, *user.store, *gateway);
        std::set<std::string> fids(run.fids.begin(), run.fids.end());
        json ack = json::array();
        for (std::size_t r = 0; r < c.ref_fids.size(); ++r) {
          bool yes = fids.count(c.ref_fids[r]) != 0;
          ack.push_back(std::to_string(r + 1) + (yes ? ". Yes. " : ". No. ") + "Reference " + std::to_string(r + 1) +
                        (yes ? " is in the retrieved context." : " is not in the retrieved context."));
        }
        extra[recall_judge_key(name, c.query_id)] = response(json{{"ack", ack}}.dump());
        extra[answer_key(name, c.query_id)] = response(answer_json(c, fids));
        if (name == "pgr") extra["ANS:" + c.query_id] = response(answer_json(c, fids));
        arm_fids[name] = std::move(fids);
      }
      // Pairwise judge: prefers the answer that cites more references.
      for (const auto& a : synth_arms()) {
        for (const auto& b : synth_arms()) {
          if (a == b) continue;
          PairContext ctx;
          ctx.arm_a = a;
          ctx.arm_b = b;
          int na = refs_present(c, arm_fids[a]), nb = refs_present(c, arm_fids[b]);
          for (int p = 0; p < 2; ++p) {
            auto [first, second] = pair_labels(c.query_id, p);
            int n_first = p == 0 ? na : nb, n_second = p == 0 ? nb : na;
            std::string choice = n_first > n_second ? first : (n_second > n_first ? second : "tie");
            extra[pair_match_key(ctx, c.query_id, p)] = response(
                json{{"reasoning", "Response " + first + " cites " + std::to_string(n_first) + " relevant facts, " +
                                       second + " cites " + std::to_string(n_second) + "."},
                     {"choice", choice}}
                    .dump());
          }
        }
      }
    }
  }
  world.script.update(extra);
  return world;
}

void write_synth_world(const SynthWorld& world, const fs::path& dir) {
  for (const auto& u : world.users) {
    fs::path udir = dir / "users" / u.profile.user_id;
    write_profile(u.profile, udir / "profile.json");
    write_conversations(u.store->conversations(), udir / "conversations.jsonl");
    write_cases(u.cases, udir / "cases.jsonl");
    u.store->save(udir / "store");
  }
  fs::create_directories(dir);
  std::ofstream out(dir / "script.json");
  if (!out) throw Error(ErrorCode::IoError, "cannot write script.json");
  out << world.script.dump(1) << '\n';
}

}  // namespace pgr
