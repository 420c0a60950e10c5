#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixture.hpp"
#include "ubar/cli.hpp"
#include "ubar/corpus.hpp"

using namespace ubar;
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  int code = cli::main(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Json read_json(const fs::path& p) { return Json::parse(read_text(p)); }

// Fresh directory holding the fixture corpus and database.
struct Workspace {
  fs::path dir;
  std::string corpus;
  std::string db;

  explicit Workspace(const std::string& name, fixture::Options opts = {10, "test"}) {
    dir = fs::temp_directory_path() / ("ubar_unit_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    corpus = (dir / "corpus.json").string();
    db = (dir / "db.json").string();
    write_canonical(fixture::corpus(opts), corpus);
    write_db(fixture::database(), db);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"run", "--corpus", "x"}).code == cli::kUsage);
    CHECK(run({"--help"}).code == cli::kOk);
  }

  TEST_CASE("oracle run scores 200") {
    Workspace w("oracle");
    Result r = run({"run", "--corpus", w.corpus, "--db", w.db, "--decoder", "oracle", "--setting", "end_to_end",
                    "--output", w.path("out"), "--jobs", "2"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "Inform        Success       BLEU   Combined\n"
                   "100.00         100.00     100.00      200.0\n");
    Json m = read_json(w.path("out/metrics.json"));
    CHECK(m["metrics"]["combined"] == 200.0);
    CHECK(m["manifest"]["command"] == "run");
    CHECK(m["manifest"]["registry_version"] == "ubar-tokens-1");
    CHECK(m["manifest"]["config"]["policy"] == "window=all,belief=gen,actresp=gen,mask=full");
    CHECK(read_text(w.path("out/metrics.txt")) == r.out);
    Json t = read_json(w.path("out/transcripts.json"));
    CHECK(t["sessions"].size() == 10);
    CHECK(t["manifest"] == m["manifest"]);
  }

  TEST_CASE("runs are deterministic across worker counts") {
    Workspace w("determinism");
    for (const char* jobs : {"1", "4"}) {
      CHECK(run({"run", "--corpus", w.corpus, "--db", w.db, "--output", w.path(std::string("out") + jobs),
                 "--jobs", jobs})
                .code == cli::kOk);
    }
    CHECK(read_text(w.path("out1/transcripts.json")) == read_text(w.path("out4/transcripts.json")));
    CHECK(read_text(w.path("out1/metrics.json")) == read_text(w.path("out4/metrics.json")));
  }

  TEST_CASE("policy and setting are recorded and checked") {
    Workspace w("policy");
    Result r = run({"run", "--corpus", w.corpus, "--db", w.db, "--policy", "window=prev", "--setting",
                    "policy_optimization", "--output", w.path("out")});
    CHECK(r.code == cli::kOk);
    Json m = read_json(w.path("out/metrics.json"));
    CHECK(m["manifest"]["config"]["policy"] == "window=prev,belief=gen,actresp=gen,mask=full");
    CHECK(m["manifest"]["config"]["setting"] == "policy_optimization");
    CHECK(m["manifest"]["config_hash"].get<std::string>().size() == 16);

    CHECK(run({"run", "--corpus", w.corpus, "--db", w.db, "--policy", "window=sometimes"}).code == cli::kUsage);
    CHECK(run({"run", "--corpus", w.corpus, "--db", w.db, "--mode", "dst_lex"}).code == cli::kUsage);
    CHECK(run({"run", "--corpus", w.corpus, "--db", w.db, "--mode", "urur"}).code == cli::kUsage);
    CHECK(run({"run", "--corpus", w.corpus, "--db", w.db, "--decoder", "magic"}).code == cli::kUsage);
  }

  TEST_CASE("config file with flag overrides") {
    Workspace w("config");
    std::ofstream(w.path("run.toml")) << "[run]\nsetting = \"dst\"\npolicy = \"window=prev\"\njobs = 1\n";
    Result r = run({"run", "--config", w.path("run.toml"), "--corpus", w.corpus, "--db", w.db, "--policy",
                    "window=all", "--output", w.path("out")});
    REQUIRE(r.code == cli::kOk);
    Json m = read_json(w.path("out/metrics.json"));
    CHECK(m["manifest"]["config"]["setting"] == "dst");
    CHECK(m["manifest"]["config"]["mode"] == "dst_lex");
    CHECK(m["manifest"]["config"]["policy"] == "window=all,belief=gen,actresp=gen,mask=full");
    CHECK(m["metrics"]["joint_goal_accuracy"] == 1.0);
  }

  TEST_CASE("data errors exit 2") {
    Workspace w("data");
    CHECK(run({"run", "--corpus", w.path("missing.json"), "--db", w.db}).code == cli::kDataError);
    std::ofstream(w.path("broken.json")) << "{\"sessions\": [";
    CHECK(run({"run", "--corpus", w.path("broken.json"), "--db", w.db}).code == cli::kDataError);
    CHECK(run({"evaluate", "--corpus", w.corpus, "--db", w.db, "--transcripts", w.path("broken.json")}).code ==
          cli::kDataError);
  }

  TEST_CASE("decoder failures exit 3 past the failure threshold") {
    Workspace w("decoder");
    ::unsetenv("UBAR_LM_ENDPOINT");
    Result r = run({"run", "--corpus", w.corpus, "--db", w.db, "--decoder", "lm:http://127.0.0.1:1"});
    CHECK(r.code == cli::kDecoderError);
    CHECK_FALSE(r.err.empty());
  }

  TEST_CASE("evaluate rescores a transcript archive") {
    Workspace w("evaluate");
    REQUIRE(run({"run", "--corpus", w.corpus, "--db", w.db, "--output", w.path("out")}).code == cli::kOk);
    Json t = read_json(w.path("out/transcripts.json"));
    t["sessions"][0]["turns"][2]["response"] = "sorry .";
    std::ofstream(w.path("edited.json")) << t.dump();
    Result r = run({"evaluate", "--corpus", w.corpus, "--db", w.db, "--transcripts", w.path("edited.json"),
                    "--output", w.path("metrics.json")});
    CHECK(r.code == cli::kOk);
    Json m = read_json(w.path("metrics.json"));
    CHECK(m["metrics"]["inform"] == 100.0);
    CHECK(m["metrics"]["success"] == 90.0);
    CHECK(m["manifest"]["command"] == "evaluate");

    std::vector<GeneratedSession> back;
    for (const auto& s : t["sessions"]) back.push_back(cli::session_from_json(s));
    CHECK(cli::session_to_json(back[0]) == t["sessions"][0]);
  }

  TEST_CASE("preprocess is idempotent on canonical input") {
    Workspace w("preprocess");
    Result first = run({"preprocess", "--input", w.corpus, "--output", w.path("a.json")});
    CHECK(first.code == cli::kOk);
    CHECK(first.out == "10 sessions, 0 violations\n");
    CHECK(run({"preprocess", "--input", w.path("a.json"), "--output", w.path("b.json")}).code == cli::kOk);
    CHECK(read_text(w.path("a.json")) == read_text(w.path("b.json")));
    CHECK(read_text(w.path("a.json")) == read_text(w.corpus));
    Json rep = read_json(w.path("a.json.report.json"));
    CHECK(rep["sessions"] == 10);
    CHECK(rep["counts"]["out_of_ontology"] == 0);
  }

  TEST_CASE("preprocess reads the raw layout") {
    Workspace w("raw");
    Result r = run({"preprocess", "--input", std::string(UBAR_FIXTURES_DIR) + "/raw_multiwoz", "--db", w.db,
                    "--output", w.path("raw.json")});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.starts_with("3 sessions"));
    CHECK(detect_format(w.path("raw.json")) == CorpusFormat::kCanonical);
  }

  TEST_CASE("export writes one line per session") {
    Workspace w("export", {10, "mixed"});
    Result r = run({"export", "--corpus", w.corpus, "--output", w.path("train.txt"), "--mode", "urur"});
    CHECK(r.code == cli::kOk);
    std::ifstream in(w.path("train.txt"));
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) {
      CHECK(l.find("<sos_b>") == std::string::npos);
      ++lines;
    }
    CHECK(lines == 6);
    CHECK(fs::exists(w.path("train.txt.meta.json")));
  }

  TEST_CASE("split writes the four partitions") {
    Workspace w("split", {40, "mixed"});
    Result r = run({"split", "--corpus", w.corpus, "--held-out", "hotel", "--fewshot", "2", "--seed", "9",
                    "--output", w.path("parts")});
    CHECK(r.code == cli::kOk);
    Json m = read_json(w.path("parts/manifest.json"));
    CHECK(m["files"]["fewshot.json"] == 2);
    CHECK(m["config"]["held_out"] == "hotel");
    Corpus held = load_corpus(w.path("parts/eval_held_out.json"), CorpusFormat::kCanonical);
    for (const auto& s : held.sessions) CHECK(s.mentions("hotel"));
    CHECK(run({"split", "--corpus", w.corpus, "--held-out", "hotel", "--fewshot", "500", "--output",
               w.path("parts")})
              .code == cli::kDataError);
  }

  TEST_CASE("chat replays through the oracle with a golden transcript") {
    Workspace w("chat", {2, "test"});
    const std::string input = "i need a hotel in the north\n\n/state\nfour stars with parking\nthe address please\n"
                              "book it for one\n/quit\n";
    Result r = run({"chat", "--corpus", w.corpus, "--db", w.db, "--session", "fx0000", "--seed", "3"}, input);
    CHECK(r.code == cli::kOk);
    CHECK(r.err.empty());
    const fs::path golden = fs::path(UBAR_FIXTURES_DIR) / "chat.golden.txt";
    if (std::getenv("UBAR_UPDATE_GOLDEN")) std::ofstream(golden, std::ios::binary) << r.out;
    CHECK(r.out == read_text(golden));
    CHECK(r.out.find("[value_") == std::string::npos);

    Result again = run({"chat", "--corpus", w.corpus, "--db", w.db, "--session", "fx0000", "--seed", "3"}, input);
    CHECK(again.out == r.out);

    Result off = run({"chat", "--corpus", w.corpus, "--db", w.db, "--session", "fx0000"}, "hi\nhi\nhi\nhi\nhi\n");
    CHECK(off.code == cli::kOk);
    CHECK(off.out.find("(no response: decoder error)") != std::string::npos);
  }

  TEST_CASE("registry") {
    Result r = run({"registry"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("<sos_u>") != std::string::npos);
  }
}
