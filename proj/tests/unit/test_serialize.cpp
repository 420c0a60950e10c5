#include "doctest.h"
#include "fixture.hpp"
#include "ubar/error.hpp"
#include "ubar/serialize.hpp"

using namespace ubar;

TEST_SUITE("serialize") {
  TEST_CASE("corpus round-trip") {
    Corpus c = fixture::corpus();
    auto j = json::corpus_to_json(c);
    Corpus back = json::corpus_from_json(j, "fixture");
    CHECK(back == c);
    CHECK(json::corpus_to_json(back).dump() == j.dump());
  }

  TEST_CASE("unknown act type") {
    auto j = json::Json::parse(R"([{"domain": "hotel", "acts": [{"act": "persuade", "slots": []}]}])");
    CHECK_THROWS_AS(json::act_from_json(j, "x"), UnknownActType);
  }

  TEST_CASE("unknown domain") {
    auto j = json::Json::parse(R"([{"domain": "spaceship", "slots": {"speed": "fast"}}])");
    CHECK_THROWS_AS(json::belief_from_json(j, "x"), UnknownDomain);
  }

  TEST_CASE("parse errors carry a position") {
    auto j = json::session_to_json(fixture::corpus().sessions[0]);
    j["turns"][1]["turn"] = 5;
    try {
      json::session_from_json(j, "s");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.where().find("s") == 0);
    }
    auto empty = json::session_to_json(fixture::corpus().sessions[0]);
    empty["turns"] = json::Json::array();
    CHECK_THROWS_AS(json::session_from_json(empty, "s"), ParseError);
  }
}
