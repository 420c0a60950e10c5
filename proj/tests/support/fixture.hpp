#pragma once

// Synthetic corpus and database used across the test suites. Every gold
// response answers its goal, so a replay of the gold turns scores full marks.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ubar/dbquery.hpp"
#include "ubar/types.hpp"

namespace fixture {

// 6 hotels (3 with stars=4 and parking=yes), 5 restaurants, 4 attractions,
// 6 trains.
ubar::EntityDb database();

struct Options {
  std::size_t sessions = 10;
  // "test" for every session, or "mixed": i%10 in 0..5 train, 6..7 dev, 8..9 test.
  std::string split = "test";
};

// Session i covers entity domain (hotel, restaurant, attraction, train)[i % 4].
// Even sessions have 4 turns; odd sessions add a taxi and run 6 turns.
ubar::Corpus corpus(const Options& options = {});

// Searchable-slot filter written out independently of the library: the
// entities of `domain` equal to every non-"dontcare" constraint on a column
// the domain's table has.
std::vector<const ubar::Entity*> brute_match(const ubar::EntityDb& db, const std::string& domain,
                                             const std::map<std::string, std::string>& constraints);

// Deterministic generator for property tests (splitmix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }
  bool coin() { return (next() & 1U) != 0; }
  template <typename C>
  const auto& pick(const C& c) {
    return c[below(c.size())];
  }

 private:
  std::uint64_t state_;
};

// Random belief and act frame over the fixture ontology.
ubar::BeliefState random_belief(Rng& rng, const ubar::Ontology& ontology);
ubar::ActFrame random_act(Rng& rng);

}  // namespace fixture
