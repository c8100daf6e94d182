// Writes the worked pre-order example as a replayable fixture:
//   <out>/store/       facts with hand-placed embeddings
//   <out>/script.json  scripted completions plus EMB: vectors for every probe
//   <out>/cases.jsonl  the query with its four required references
//
// Every fact owns one axis of the embedding space; a probe's vector is the
// normalized sum of the axes it should hit, so each probe returns exactly
// its targets (cosine 1/sqrt(m) with m <= 5 stays above the 0.3 threshold).
//
//   make_preorder_fixture <out-dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "pgr/eval/metrics.hpp"
#include "pgr/gateway/backend.hpp"
#include "pgr/memory/store.hpp"
#include "pgr/prospection/pgr.hpp"

using namespace pgr;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kQid = "preorder";
constexpr const char* kQuery =
    "I want to pre-order a new game that just got announced. Check if it makes sense for me to do it now.";
constexpr const char* kAugmented =
    "Decide whether pre-ordering a newly announced game now fits the user's budget rules, gaming commitments and "
    "hardware situation.";

struct FactRow {
  const char* date;
  FactType type;
  const char* info;
};

// Indices 0-14 surface in phase 1, 15-19 in iteration 1, 20-21 in iteration 2,
// 22-29 are never probed.
const FactRow kFacts[] = {
    {"2026-03-01", FactType::Preference,
     "User prefers finishing one main game at a time; avoids starting new games until the current one is completed or "
     "consciously dropped."},
    {"2026-02-23", FactType::Preference,
     "2-rule purchase system: under EUR 10 requires a 24-hr wait; over EUR 10 must fit fun money AND be played "
     "immediately. User is muting sale notifications until after the March trip."},
    {"2026-02-23", FactType::Preference,
     "Frames trip money as 'already spent' to mentally lock it. Rule: trip money is locked, games from fun money only, "
     "if fun money = 0 EUR wishlist and wait."},
    {"2026-02-23", FactType::Goal,
     "Fun money for March: EUR 10 (tight) to EUR 15-20 (normal); trip savings locked in a separate pocket labelled DO "
     "NOT TOUCH."},
    {"2026-03-01", FactType::Goal,
     "Prioritising RDR2 main story: 90-min capped sessions x2/week (Wed afternoons). Witcher 3 parked guilt-free."},
    {"2026-03-01", FactType::Preference,
     "Gaming sessions capped at 90 min to prevent late nights and keep focus for job applications and the 9:00 AM "
     "alarm."},
    {"2025-12-29", FactType::Preference, "Keyboard and mouse for gaming; mostly RPGs; prefers long sessions."},
    {"2026-03-03", FactType::Preference,
     "Prefers maintenance over upgrades for the GTX 1660 Super GPU due to a tight budget, locked travel savings and "
     "upcoming online course expenses."},
    {"2026-02-21", FactType::Goal, "Tracks fun money (EUR 15-20) weekly; Sunday 18:00 reminder 'Quick check: fun money (5 min)'."},
    {"2025-12-29", FactType::Preference,
     "Enjoys gaming evenings and weekends to save money but limits bedtime shifts to avoid disrupting weekday routines."},
    {"2026-01-29", FactType::Goal, "EUR 50 bill as a visual safety net for the next 3 days, kept untouched as a measure of financial control."},
    {"2026-02-14", FactType::Preference, "Prefers fun sci-fi or action movies for casual friend hangouts."},
    {"2025-12-27", FactType::Preference, "Budget-friendly charger replacements; uses Amazon.es and PcComponentes."},
    {"2026-01-16", FactType::Goal,
     "Calendar note for Friday interviews: 'Possible transport disruption, message recruiter by 7:30 if issues'."},
    {"2026-02-03", FactType::Goal, "Recurring 'Available for interviews' note protecting early afternoons."},
    {"2026-02-21", FactType::Goal, "Track fun money (EUR 15-20) weekly; Sunday 18:00 reminder."},
    {"2026-01-29", FactType::Goal, "EUR 50 bill as visual safety net, keep untouched."},
    {"2026-02-20", FactType::Goal,
     "Plans to open the PC case side panel during gaming sessions to test airflow and reduce GPU overheating."},
    {"2025-12-29", FactType::Event,
     "Eye strain during late-night gaming; uses blue light filters, reduced brightness and warm lighting to mitigate "
     "fatigue."},
    {"2026-02-23", FactType::Goal, "Weekly Sunday reminder 'March trip fund still locked' to reinforce saving discipline."},
    {"2026-02-07", FactType::Goal, "Flag 'bad-weather mornings' in weekly reviews to avoid early outdoor plans unexpectedly."},
    {"2026-01-27", FactType::Goal,
     "Weekly co-op gaming with friends Thursdays 9:00-11:30 PM; marked Busy to avoid interview conflicts; wrap-up "
     "reminder at 11:45 PM for an early Friday wake-up."},
    {"2026-01-05", FactType::Interest, "Follows the Valencia basketball team and watches home games with a cousin."},
    {"2026-01-12", FactType::Event, "Renewed the residence permit appointment at the local office."},
    {"2026-01-20", FactType::Preference, "Drinks oat milk and avoids dairy in coffee."},
    {"2026-02-02", FactType::Event, "Helped a neighbour move a sofa up three flights of stairs."},
    {"2026-02-10", FactType::Interest, "Learning to cook lentil stews on Sundays."},
    {"2026-02-16", FactType::Event, "Dentist check-up went fine; next visit in six months."},
    {"2026-02-26", FactType::Preference, "Prefers trains over buses for trips longer than two hours."},
    {"2026-03-02", FactType::Event, "Sister's birthday dinner planned for mid-March."},
};
constexpr std::size_t kFactCount = sizeof(kFacts) / sizeof(kFacts[0]);

struct NodeRow {
  const char* id;
  const char* action;
  const char* constraints;
  const char* parent;
  std::vector<std::string> children;
  std::vector<int> targets;
};

// Same topology in all three trees: A1 -> {A2, A3}; A2 -> {A4, A5};
// A4 -> A7 -> A9; A3 -> A6 -> A8.
const std::vector<NodeRow> kPhase1 = {
    {"A1", "Check the game's release date and pre-order availability",
     "official announcement, platform compatibility, region restrictions", nullptr, {"A2", "A3"}, {13, 14}},
    {"A2", "Look up gameplay trailers or developer previews", "video quality, gameplay mechanics, genre preference",
     "A1", {"A4", "A5"}, {6, 11}},
    {"A4", "Read reviews from early access / beta testers", "reviewer credibility, performance feedback", "A2", {"A7"},
     {6}},
    {"A7", "Decide if game aligns with personal gaming preferences", "time available, interest in story/mechanics", "A4",
     {"A9"}, {5, 9}},
    {"A9", "Pre-order or wait for post-release reviews", "confidence in purchase, willingness to wait, FOMO", "A7", {},
     {1}},
    {"A5", "Compare with similar games in the genre", "gameplay depth, replay value, prior genre experience", "A2", {},
     {0, 4}},
    {"A3", "Check pre-order bonuses or exclusive content", "bonus relevance, edition types, availability", "A1", {"A6"},
     {12}},
    {"A6", "Check the pre-order price and payment options", "budget, refund policy, currency exchange rates", "A3", {"A8"},
     {1, 2, 3, 8, 10}},
    {"A8", "Evaluate risk of bugs / incomplete features at launch",
     "developer track record, past launch issues, patch history", "A6", {}, {7}},
};

const std::vector<NodeRow> kIteration1 = {
    {"A1", "Check the game's release date and pre-order availability",
     "official announcement, platform compatibility, region restrictions", nullptr, {"A2", "A3"}, {13, 14}},
    {"A2", "Look up gameplay trailers or developer previews",
     "genre preference, relevance to current gaming interests, RPGs", "A1", {"A4", "A5"}, {6, 18}},
    {"A4", "Read reviews from early access / beta testers", "reviewer credibility, alignment with gaming preferences",
     "A2", {"A7"}, {6}},
    {"A7", "Decide if game aligns with personal gaming preferences",
     "time available, current RDR2 commitment, must finish before starting new games", "A4", {"A9"}, {4, 5}},
    {"A9", "Pre-order or wait", "FOMO, fun money only; current RDR2 focus", "A7", {}, {1, 19}},
    {"A5", "Compare with similar games", "gameplay depth, preference for RPGs and long sessions", "A2", {}, {0, 6}},
    {"A3", "Check pre-order bonuses", "", "A1", {"A6"}, {12}},
    {"A6", "Check pre-order price and payment options",
     "budget, fun money only; over EUR 10 requires immediate playability; refund policy", "A3", {"A8"}, {1, 3, 15, 16}},
    {"A8", "Evaluate risk of bugs at launch",
     "track record, preference for maintenance over upgrades; tight budget and online course expenses", "A6", {},
     {7, 17}},
};

const std::vector<NodeRow> kIteration2 = {
    {"A1", "Check the game's release date and pre-order availability",
     "release date relevance to March trip AND RDR2 completion goal", nullptr, {"A2", "A3"}, {2, 4, 20}},
    {"A2", "Look up gameplay trailers or developer previews", "genre preference, RPGs, alignment with 90-min session cap",
     "A1", {"A4", "A5"}, {5, 21}},
    {"A4", "Read reviews from early access / beta testers",
     "reviewer credibility, focus on avoiding games with launch bugs or incomplete features", "A2", {"A7"}, {7}},
    {"A7", "Decide if game aligns with personal gaming preferences",
     "RDR2 in progress; 90-min sessions x2/week; starting a new game violates current commitment", "A4", {"A9"}, {4, 5}},
    {"A9", "Pre-order or wait", "fun money EUR 15-20 for March; trip money non-negotiable; FOMO low", "A7", {}, {2, 3}},
    {"A5", "Compare with similar games", "RDR2/Witcher 3 backlog already present", "A2", {}, {0}},
    {"A3", "Check pre-order bonuses", "", "A1", {"A6"}, {12}},
    {"A6", "Check pre-order price and payment options",
     "fun money capped EUR 15-20; over EUR 10 requires immediate playability, not possible while on RDR2", "A3", {"A8"},
     {1, 3}},
    {"A8", "Evaluate risk of bugs at launch", "GPU overheating issue; prefers maintenance; online course costs in March",
     "A6", {}, {7, 17}},
};

const std::vector<int> kQueryTargets = {0, 4, 6};

// Required references: GPU overheating, trip money locked, course expenses, RDR2 first.
const int kRefFacts[] = {17, 2, 7, 4};
const char* kRefTexts[] = {
    "GPU overheating issue, user plans to reduce overheating during gaming",
    "March trip funds locked, user frames trip money as 'already spent'",
    "Upcoming online course expenses constraining GPU/hardware budget",
    "Backlog of unfinished games, user committed to completing RDR2 before any new title",
};
const char* kRefDates[] = {"2026-02-20", "2026-02-23", "2026-03-03", "2026-03-01"};

constexpr const char* kSummary =
    "The user may initially focus on confirming release date, platform compatibility, and pre-order availability, "
    "while exploring trailers and bonuses to gauge interest. Considerations then shift to gameplay mechanics, genre "
    "alignment, and budget constraints. Over time, the decision is further refined by comparing the game with similar "
    "titles, assessing early reviews for launch issues, and ensuring it fits the current gaming schedule (finishing "
    "RDR2 first). By the final stage, the decision hinges on specific factors: release timing relative to the March "
    "trip, strict fun-money budget constraints, and a preference for 90-minute capped sessions, ultimately pointing "
    "toward adding the game to the wishlist rather than pre-ordering now.";

const std::vector<std::string> kReasoning = {
    "Trip money is mentally locked ('already spent'); fun money is the only game budget.",
    "Fun money for March: EUR 15-20 depending on stress and cash availability.",
    "2-rule system: over EUR 10 must fit fun money AND be something played immediately; RDR2 is in progress.",
    "Muting sale notifications on gaming platforms until after the March trip.",
    "Currently committed to finishing RDR2 before starting any new game.",
    "GPU overheating issue flagged (2026-02-20); prefers maintenance over upgrades.",
    "Upcoming online course expenses further constrain discretionary spending in March.",
    "Backlog already includes Witcher 3 (parked); adding another title is premature.",
    "Pre-ordering now would violate the 2-rule system (can't play immediately).",
    "Query date is 2026-03-05; trip savings locked and non-negotiable.",
};

constexpr const char* kAnswer =
    "Pre-ordering now likely isn't the right move. You're mid-way through RDR2 and your 2-rule system requires any "
    "purchase over EUR 10 to be something you'll play immediately, and that's not the case here. Your March trip fund "
    "is locked, and fun money is limited this month. Add it to your wishlist, mute the notifications (as you planned), "
    "and revisit after the trip or once RDR2 is wrapped up.";

std::string fid_of(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f%06d", index + 1);
  return buf;
}

std::vector<double> axes(const std::vector<int>& targets, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (int t : targets) v[static_cast<std::size_t>(t)] = 1.0;
  return v;
}

json tree_of(const std::vector<NodeRow>& rows) {
  json nodes = json::array();
  for (const auto& r : rows) {
    nodes.push_back({{"action_id", r.id},
                     {"action", r.action},
                     {"constraints", r.constraints},
                     {"parent", r.parent ? json(r.parent) : json(nullptr)},
                     {"children", r.children}});
  }
  return nodes;
}

json response(const std::string& text) { return json{{"response", text}}; }

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_preorder_fixture <out-dir>\n";
    return 2;
  }
  const fs::path out = argv[1];
  const std::size_t dim = HashingEmbedder::kDefaultDimension;
  try {
    json script = json::object();
    std::map<std::string, std::vector<int>> probes;  // text -> targets, checked for consistency
    auto add_probe = [&](const std::string& text, const std::vector<int>& targets) {
      auto [it, fresh] = probes.emplace(text, targets);
      if (!fresh && it->second != targets) throw std::runtime_error("probe text reused with other targets: " + text);
    };
    add_probe(kQuery, kQueryTargets);
    add_probe(kAugmented, kQueryTargets);
    for (const auto* tree : {&kPhase1, &kIteration1, &kIteration2}) {
      for (const auto& r : *tree) add_probe(probe_text({r.action, r.constraints}, true), r.targets);
    }
    for (const auto& [text, targets] : probes) {
      script[std::string(ScriptedBackend::kEmbeddingPrefix) + text] = json{{"vector", axes(targets, dim)}};
    }

    script[augment_key(kQid)] = response(kAugmented);
    script[phase1_key(ProspectionMode::Tot, kQid)] = response(tree_of(kPhase1).dump());
    script[refine_key(ProspectionMode::Tot, 1, kQid)] = response(tree_of(kIteration1).dump());
    script[refine_key(ProspectionMode::Tot, 2, kQid)] = response(tree_of(kIteration2).dump());
    script[summary_key(kQid)] = response(kSummary);
    script["ANS:" + std::string(kQid)] = response(json{{"reasoning", kReasoning}, {"answer", kAnswer}}.dump());

    fs::create_directories(out);
    std::ofstream(out / "script.json") << script.dump(1) << '\n';

    auto backend = std::make_shared<ScriptedBackend>(script, dim);
    MemoryStore store(backend);
    std::set<std::string> dates;
    for (const auto& f : kFacts) dates.insert(f.date);
    for (const auto& d : dates) {
      ConversationLog log;
      log.conversation_id = "pre-" + d;
      log.session_date = Date::parse_or_throw(d);
      log.turns = {{Speaker::User, "(session on " + d + ")"}};
      store.add_conversation(std::move(log));
    }
    store.clear_pending(store.pending_conversations());
    for (std::size_t i = 0; i < kFactCount; ++i) {
      Fact fact;
      fact.fid = fid_of(static_cast<int>(i));
      fact.info = kFacts[i].info;
      fact.fact_type = kFacts[i].type;
      fact.conversation_ids = {std::string("pre-") + kFacts[i].date};
      fact.created_date = fact.updated_date = Date::parse_or_throw(kFacts[i].date);
      fact.embedding = EmbeddingVector::from_raw(axes({static_cast<int>(i)}, dim));
      store.insert_fact(std::move(fact));
    }
    store.save(out / "store");

    QueryCase c;
    c.query_id = kQid;
    c.user_id = "pre-user";
    c.query = kQuery;
    c.query_date = Date::parse_or_throw("2026-03-05");
    std::vector<std::string> ref_fids;
    for (std::size_t r = 0; r < 4; ++r) {
      c.required_references.push_back({"r" + std::to_string(r + 1), kRefTexts[r], Date::parse_or_throw(kRefDates[r])});
      ref_fids.push_back(fid_of(kRefFacts[r]));
    }
    c.reference_fact_ids = ref_fids;
    write_cases({c}, out / "cases.jsonl");
  } catch (const std::exception& e) {
    std::cerr << "make_preorder_fixture: " << e.what() << '\n';
    return 1;
  }
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}
