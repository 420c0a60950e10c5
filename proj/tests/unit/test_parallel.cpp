#include <atomic>
#include <stdexcept>

#include "doctest.h"
#include "ubar/parallel.hpp"

using namespace ubar;

TEST_SUITE("parallel") {
  TEST_CASE("results keep index order") {
    for (std::size_t workers : {1, 2, 7, 64}) {
      auto out = parallel_map(100, workers, [](std::size_t i) { return i * i; });
      REQUIRE(out.size() == 100);
      for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
    }
    CHECK(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
  }

  TEST_CASE("every index runs once") {
    std::atomic<int> calls{0};
    parallel_map(257, 5, [&](std::size_t) { return ++calls; });
    CHECK(calls == 257);
  }

  TEST_CASE("exceptions propagate") {
    CHECK_THROWS_AS(parallel_map(50, 4,
                                 [](std::size_t i) {
                                   if (i == 17) throw std::runtime_error("boom");
                                   return i;
                                 }),
                    std::runtime_error);
  }
}
