#include <set>
#include <sstream>

#include "doctest.h"
#include "ubar/tokens.hpp"

using namespace ubar;

TEST_SUITE("tokens") {
  TEST_CASE("TokenSeq basics") {
    TokenSeq s = TokenSeq::from_text("  a b\t c\n");
    CHECK(s.size() == 3);
    CHECK(s.str() == "a b c");
    s.append_words("d e");
    CHECK(s.slice(1, 4).str() == "b c d");
    CHECK(s.count("c") == 1);
    CHECK(TokenSeq::from_text("").empty());
  }

  TEST_CASE("framing tokens") {
    CHECK(sos(Component::kBelief) == "<sos_b>");
    CHECK(eos(Component::kDb) == "<eos_db>");
    auto f = tokens::framing("<eos_r>");
    REQUIRE(f);
    CHECK(f->first == Component::kResponse);
    CHECK_FALSE(f->second);
    CHECK_FALSE(tokens::framing("<sos_x>"));
    CHECK_FALSE(tokens::framing("sos_b"));
  }

  TEST_CASE("registry is closed and unique") {
    const auto& reg = tokens::registry();
    std::set<std::string> unique(reg.begin(), reg.end());
    CHECK(unique.size() == reg.size());
    CHECK(reg.size() == 10 + 8 + 13 + 5 + 27);
    CHECK(tokens::role("<sos_u>") == TokenRole::kFraming);
    CHECK(tokens::role("[general]") == TokenRole::kDomain);
    CHECK(tokens::role("[offerbooked]") == TokenRole::kAct);
    CHECK(tokens::role("[db_nores]") == TokenRole::kDb);
    CHECK(tokens::role("[value_name]") == TokenRole::kPlaceholder);
    CHECK_FALSE(tokens::is_special("[value_hotel]"));
    CHECK_FALSE(tokens::is_special("hotel"));
  }

  TEST_CASE("registry file") {
    std::ostringstream os;
    tokens::write_registry(os);
    CHECK(TokenSeq::from_text(os.str()).size() == tokens::registry().size());
  }

  TEST_CASE("placeholders") {
    CHECK(tokens::placeholder("name") == "[value_name]");
    CHECK(tokens::placeholder_slot("[value_postcode]") == "postcode");
    CHECK_FALSE(tokens::placeholder_slot("[value_]"));
    CHECK_FALSE(tokens::placeholder_slot("[value_Name]"));
    CHECK_FALSE(tokens::placeholder_slot("value_name"));
    CHECK(tokens::unbracket("[hotel]") == "hotel");
    CHECK_FALSE(tokens::unbracket("hotel"));
  }
}
