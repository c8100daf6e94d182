#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "pgr/benchgen/synth.hpp"
#include "pgr/cli/cli.hpp"

using namespace pgr;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args, const std::string& input = "") {
  std::ostringstream out, err;
  std::istringstream in(input);
  int code = run_command(args, out, err, in);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) { return json::parse(test::read_file(p)); }

// Copy of the bundled replay store, so commands that save do not touch the fixture.
fs::path preorder_copy(const fs::path& root) {
  fs::copy(test::fixture_dir("preorder_replay"), root / "preorder", fs::copy_options::recursive);
  return root / "preorder";
}

std::vector<std::string> preorder_query(const fs::path& pre, const fs::path& runs) {
  return {"query", "--store", (pre / "store").string(), "--scripted", (pre / "script.json").string(),
          "--q", "I want to pre-order a new game that just got announced. Check if it makes sense for me to do it now.",
          "--date", "2026-03-05", "--qid", "preorder", "--mode", "tot", "--output-dir", runs.string(), "--run-id", "r1"};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("query writes trace, answer and resolved config") {
  test::TempDir dir("cli-query");
  auto pre = preorder_copy(dir.path());
  auto r = cli(preorder_query(pre, dir.path() / "runs"));
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  fs::path run = dir.path() / "runs" / "r1";
  CHECK(fs::exists(run / "trace" / "preorder.json"));
  CHECK(fs::exists(run / "answers" / "r1.jsonl"));
  json t = read_json(run / "trace" / "preorder.json");
  CHECK(t["final_facts"].size() == 22);
  json cfg = read_json(run / "config.resolved.json");
  CHECK(cfg["pgr"]["mode"] == "tot");
  CHECK(cfg["run_id"] == "r1");
  CHECK(cfg["backend"]["kind"] == "scripted");
}

TEST_CASE("trace show renders the tree and facts") {
  test::TempDir dir("cli-trace");
  auto pre = preorder_copy(dir.path());
  REQUIRE(cli(preorder_query(pre, dir.path() / "runs")).code == 0);
  auto r = cli({"trace", "show", "preorder", "--run", (dir.path() / "runs" / "r1").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Phase 1 - Initial TOT") != std::string::npos);
  CHECK(r.out.find("Iteration 2 - Personalized TOT") != std::string::npos);
  CHECK(r.out.find("├── ") != std::string::npos);
  CHECK(r.out.find("Retrieved facts (15)") != std::string::npos);
  CHECK(r.out.find("New facts (5)") != std::string::npos);
  CHECK(r.out.find("New facts (2)") != std::string::npos);
  CHECK(r.out.find("Final fact set: 22 facts") != std::string::npos);
  CHECK(r.out.find("Answer:") != std::string::npos);
  CHECK(cli({"trace", "show", "nope", "--run", (dir.path() / "runs" / "r1").string()}).code == 1);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  test::TempDir dir("cli-config");
  auto pre = preorder_copy(dir.path());
  fs::path cfg_path = dir.path() / "cfg.json";
  std::ofstream(cfg_path) << json{{"output_dir", (dir.path() / "from-config").string()},
                                  {"pgr", {{"mode", "cot"}, {"max_iterations", 4}}}}
                                 .dump();
  auto args = preorder_query(pre, dir.path() / "runs");
  args.push_back("--config");
  args.push_back(cfg_path.string());
  auto r = cli(args);
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK_FALSE(fs::exists(dir.path() / "from-config"));
  json cfg = read_json(dir.path() / "runs" / "r1" / "config.resolved.json");
  CHECK(cfg["pgr"]["mode"] == "tot");
  CHECK(cfg["pgr"]["max_iterations"] == 4);
  CHECK(cfg["pgr"]["delta_threshold"] == 5);
}

TEST_CASE("usage errors exit 2") {
  auto r = cli({"query", "--bogus"});
  CHECK(r.code == 2);
  CHECK_FALSE((r.out + r.err).empty());
  CHECK(cli({}).code == 2);
  test::TempDir dir("cli-usage");
  // No backend configured.
  CHECK(cli({"query", "--q", "x", "--store", dir.path().string()}).code == 2);
  fs::path bad = dir.path() / "bad.json";
  std::ofstream(bad) << R"({"colour": "blue"})";
  CHECK(cli({"benchgen", "--synthetic", "--out", dir.path().string(), "--config", bad.string()}).code == 2);
  CHECK(cli({"benchgen", "--out", dir.path().string()}).code == 2);
}

TEST_CASE("help exits 0") {
  auto r = cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("benchgen") != std::string::npos);
}

TEST_CASE("eval on a synthetic world: PGR beats query-only") {
  test::TempDir dir("cli-eval");
  fs::path data = dir.path() / "ds";
  REQUIRE(cli({"benchgen", "--synthetic", "--seed", "3", "--users", "2", "--facts", "60", "--queries", "2", "--out",
               data.string()})
              .code == 0);
  auto r = cli({"eval", "--data", data.string(), "--arm", "pgr", "--arm", "query-only", "--oracle", "--scripted",
                (data / "script.json").string(), "--output-dir", (dir.path() / "runs").string(), "--run-id", "e1"});
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  json rep = read_json(dir.path() / "runs" / "e1" / "report.json");
  double pgr_recall = rep["arms"]["pgr"]["mean_recall"];
  double qo_recall = rep["arms"]["query-only"]["mean_recall"];
  CHECK(pgr_recall > qo_recall);
  CHECK(rep["arms"]["pgr"]["n"] == 4);
}

TEST_CASE("ingest, extract and consolidate on a scripted store") {
  test::TempDir dir("cli-ingest");
  fs::path convs = dir.path() / "c.jsonl";
  json log{{"conversation_id", "c1"},
           {"session_date", "2025-03-01"},
           {"turns", json::array({{{"speaker", "user"}, {"text", "I adopted a cat named Miso."}},
                                  {{"speaker", "agent"}, {"text", "Congratulations!"}}})}};
  std::ofstream(convs) << log.dump() << '\n';
  fs::path script = dir.path() / "script.json";
  json facts = json::array({{{"fid", "NEW_1"}, {"type", "Event"}, {"info", "User adopted a cat named Miso"},
                             {"frequency", 1}, {"state", "add"}}});
  std::ofstream(script) << json{{"EXTRACT:c1", {{"response", facts.dump()}}}}.dump();
  fs::path store = dir.path() / "store";
  std::vector<std::string> common = {"--store", store.string(), "--scripted", script.string(),
                                     "--output-dir", (dir.path() / "runs").string()};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), common.begin(), common.end());
    return a;
  };
  auto r = cli(with({"ingest", convs.string()}));
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("1 pending") != std::string::npos);
  r = cli(with({"extract", "--force", "--run-id", "x1"}));
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("1 added") != std::string::npos);
  CHECK(fs::exists(dir.path() / "runs" / "x1" / "extraction_audit.jsonl"));
  r = cli(with({"consolidate", "--run-id", "k1"}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("not due") != std::string::npos);
}

}
