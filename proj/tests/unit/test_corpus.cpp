#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixture.hpp"
#include "ubar/corpus.hpp"
#include "ubar/error.hpp"
#include "ubar/serialize.hpp"

using namespace ubar;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "ubar_unit_corpus";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const fs::path kRaw = fs::path(UBAR_FIXTURES_DIR) / "raw_multiwoz";

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("the synthetic fixture is valid") {
    auto report = validate(fixture::corpus({40, "mixed"}));
    for (const auto& v : report.violations) INFO(violation_name(v.kind), " ", v.session_id, " ", v.detail);
    CHECK(report.empty());
  }

  TEST_CASE("canonical files round-trip byte for byte") {
    const Corpus c = fixture::corpus({12, "mixed"});
    const fs::path a = scratch("a.json");
    const fs::path b = scratch("b.json");
    write_canonical(c, a);
    CHECK(detect_format(a) == CorpusFormat::kCanonical);
    Corpus back = load_corpus(a, CorpusFormat::kCanonical);
    CHECK(back == c);
    write_canonical(back, b);
    CHECK(read_text(a) == read_text(b));
  }

  TEST_CASE("canonical loading rejects unknown act types and duplicate ids") {
    auto j = json::corpus_to_json(fixture::corpus({2, "test"}));
    j["sessions"][0]["turns"][0]["act"][0]["acts"][0]["act"] = "persuade";
    const fs::path p = scratch("bad_act.json");
    write_text(p, j.dump());
    CHECK_THROWS_AS(load_corpus(p, CorpusFormat::kCanonical), UnknownActType);

    auto dup = json::corpus_to_json(fixture::corpus({2, "test"}));
    dup["sessions"][1]["session_id"] = dup["sessions"][0]["session_id"];
    write_text(p, dup.dump());
    CHECK_THROWS_AS(load_corpus(p, CorpusFormat::kCanonical), DataError);

    write_text(p, "{\"sessions\": [");
    CHECK_THROWS_AS(load_corpus(p, CorpusFormat::kCanonical), DataError);
  }

  TEST_CASE("canonical loading normalizes values") {
    auto j = json::corpus_to_json(fixture::corpus({1, "test"}));
    j["sessions"][0]["turns"][0]["belief"][0]["slots"]["area"] = "Center";
    const fs::path p = scratch("center.json");
    write_text(p, j.dump());
    Corpus c = load_corpus(p, CorpusFormat::kCanonical);
    CHECK(*c.sessions[0].turns[0].belief.get("hotel", "area") == "centre");
  }

  TEST_CASE("raw MultiWOZ layout") {
    const EntityDb db = fixture::database();
    LoadOptions opts;
    opts.db = &db;
    CHECK(detect_format(kRaw) == CorpusFormat::kMultiwozRaw);
    Corpus c = load_corpus(kRaw, CorpusFormat::kMultiwozRaw, opts);
    REQUIRE(c.sessions.size() == 3);

    const DialogSession* sng = c.find("SNG0001");
    const DialogSession* mul = c.find("MUL0002");
    const DialogSession* pmul = c.find("PMUL0003");
    REQUIRE(sng);
    REQUIRE(mul);
    REQUIRE(pmul);
    CHECK(sng->split == "train");
    CHECK(mul->split == "test");
    CHECK(pmul->split == "dev");

    REQUIRE(sng->turns.size() == 2);
    CHECK(sng->turns[0].user == "i need a place to stay in the north with free parking .");
    CHECK(sng->turns[0].response_delex ==
          "[value_name] is a [value_stars] star [value_type] in the [value_area] . would you like to book ?");
    CHECK(sng->turns[0].response_lex == "acorn guest house is a 4 star guesthouse in the north . would you like to book ?");
    CHECK(sng->turns[0].db_match == 3u);
    CHECK(sng->turns[1].response_delex.find("[value_reference]") != std::string::npos);
    CHECK(sng->turns[1].response_delex.find("[value_phone]") != std::string::npos);
    CHECK(sng->goal.find("hotel")->book);
    CHECK(sng->goal.find("police") == nullptr);

    REQUIRE(mul->turns.size() == 2);
    CHECK(*mul->turns[0].belief.get("restaurant", "area") == "centre");
    CHECK(mul->turns[0].response_delex ==
          "[value_name] is an [value_pricerange] [value_food] place in the [value_area] . it is at [value_address] , "
          "[value_postcode] .");
    const GoalDomain* taxi = mul->goal.find("taxi");
    REQUIRE(taxi);
    CHECK(taxi->informable.at("leave") == "17:15");
    CHECK(taxi->requestable == std::vector<std::string>{"car", "phone"});
    CHECK_FALSE(mul->turns[1].db_match.has_value());

    // acts for this dialogue live only in dialogue_acts.json
    CHECK_FALSE(pmul->turns[0].act.empty());
    CHECK(pmul->turns[0].response_delex.find("[value_id]") != std::string::npos);

    for (const auto& v : validate(c).violations) {
      CHECK_MESSAGE(v.kind != Violation::Kind::kInvalidRequestable, v.detail);
      CHECK_MESSAGE(v.kind != Violation::Kind::kPlaceholderLeak, v.detail);
    }
  }

  TEST_CASE("validation reports each violation kind") {
    using K = Violation::Kind;
    Corpus c = fixture::corpus({2, "test"});
    c.sessions[0].turns[1].response_lex = "i recommend [value_name] .";
    c.sessions[0].turns[0].belief.set("hotel", "stars", "fife");
    c.sessions[0].turns[2].response_delex = "[value_colour] and north";
    c.sessions[0].turns[2].belief.set("hotel", "area", "north");
    c.sessions[1].goal.domains[0].requestable.push_back("bogus");
    c.sessions.push_back(c.sessions[1]);
    ValidationReport r = validate(c);
    CHECK(r.count(K::kPlaceholderLeak) == 1);
    CHECK(r.count(K::kOutOfOntology) == 1);
    CHECK(r.count(K::kInvalidPlaceholder) == 1);
    CHECK(r.count(K::kMissingPlaceholder) >= 1);
    CHECK(r.count(K::kInvalidRequestable) == 2);
    CHECK(r.count(K::kDuplicateSessionId) == 1);
  }

  TEST_CASE("utterance normalization") {
    CHECK(normalize_utterance("Hello, World!") == "hello , world !");
    CHECK(normalize_utterance("It costs 4.40 pounds.") == "it costs 4.40 pounds .");
  }

  TEST_CASE("standard split partitions by tag") {
    const Corpus c = fixture::corpus({30, "mixed"});
    auto s = split_standard(c);
    CHECK(s.train.sessions.size() == 18);
    CHECK(s.dev.sessions.size() == 6);
    CHECK(s.test.sessions.size() == 6);
    CHECK(s.test.ontology == c.ontology);
  }

  TEST_CASE("property: leave-one-domain-out split") {
    const Corpus c = fixture::corpus({60, "mixed"});
    fixture::Rng rng(7);
    for (int iter = 0; iter < 50; ++iter) {
      const std::string held = std::string(rng.pick(schema::eval_domains()));
      std::size_t candidates = 0;
      for (const auto& s : c.sessions) candidates += s.split == "train" && s.mentions(held);
      const std::size_t n = rng.below(candidates + 1);
      const std::uint64_t seed = rng.next();
      auto split = split_leave_one_domain_out(c, held, n, seed);
      CAPTURE(held);
      for (const auto& s : split.train_without.sessions) CHECK_FALSE(s.mentions(held));
      for (const auto& s : split.eval_in_domain.sessions) CHECK_FALSE(s.mentions(held));
      for (const auto& s : split.eval_held_out.sessions) CHECK(s.mentions(held));
      CHECK(split.fewshot.sessions.size() == n);
      std::set<std::string> ids;
      for (const auto& s : split.fewshot.sessions) {
        CHECK(s.split == "train");
        CHECK(s.mentions(held));
        ids.insert(s.session_id);
      }
      CHECK(ids.size() == n);
      for (const auto& s : split.train_without.sessions) CHECK_FALSE(ids.contains(s.session_id));
      std::size_t tests = 0;
      for (const auto& s : c.sessions) tests += s.split == "test";
      CHECK(split.eval_in_domain.sessions.size() + split.eval_held_out.sessions.size() == tests);

      auto again = split_leave_one_domain_out(c, held, n, seed);
      CHECK(again.fewshot == split.fewshot);
    }
  }

  TEST_CASE("leave-one-domain-out edge cases") {
    const Corpus c = fixture::corpus({20, "mixed"});
    CHECK(split_leave_one_domain_out(c, "hotel", 0, 1).fewshot.sessions.empty());
    CHECK_THROWS_AS(split_leave_one_domain_out(c, "hotel", 1000, 1), DataError);
    CHECK_THROWS_AS(split_leave_one_domain_out(c, "police", 0, 1), DataError);
  }
}
