#include "doctest.h"
#include "ubar/schema.hpp"

using namespace ubar;

TEST_SUITE("schema") {
  TEST_CASE("act names round-trip") {
    CHECK(all_act_types().size() == 13);
    for (ActType a : all_act_types()) {
      auto back = parse_act_type(act_name(a));
      REQUIRE(back);
      CHECK(*back == a);
    }
    CHECK_FALSE(parse_act_type("offer"));
    CHECK_FALSE(parse_act_type("Inform"));
  }

  TEST_CASE("domain sets") {
    CHECK(schema::domains().size() == 7);
    CHECK(schema::act_domains().size() == 8);
    CHECK(schema::is_act_domain("general"));
    CHECK_FALSE(schema::is_domain("general"));
    CHECK(schema::eval_domains().size() == 5);
    CHECK_FALSE(schema::is_eval_domain("police"));
    CHECK_FALSE(schema::is_eval_domain("hospital"));
    CHECK(schema::is_entity_domain("train"));
    CHECK_FALSE(schema::is_entity_domain("taxi"));
    CHECK_FALSE(schema::has_database("taxi"));
    CHECK_FALSE(schema::has_database("police"));
    CHECK(schema::has_database("hotel"));
  }

  TEST_CASE("slot sets") {
    CHECK(schema::is_belief_slot("hotel", "stars"));
    CHECK(schema::is_searchable_slot("hotel", "stars"));
    CHECK(schema::is_belief_slot("hotel", "people"));
    CHECK_FALSE(schema::is_searchable_slot("hotel", "people"));
    CHECK(schema::is_requestable_slot("train", "reference"));
    CHECK_FALSE(schema::is_requestable_slot("attraction", "reference"));
    CHECK(schema::offer_slot("train") == "id");
    CHECK(schema::offer_slot("hotel") == "name");
  }

  TEST_CASE("searchable slots are belief slots") {
    for (auto d : schema::domains()) {
      for (auto s : schema::searchable_slots(d)) CHECK(schema::is_belief_slot(d, s));
    }
  }

  TEST_CASE("requestable slots of entity domains can be placeholders") {
    for (auto d : schema::domains()) {
      for (auto s : schema::requestable_slots(d)) CHECK_MESSAGE(schema::is_placeholder_slot(s), d, ".", s);
    }
  }
}
